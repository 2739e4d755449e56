"""Loading Enron-style corpora, class balancing and stratified partitioning.

The on-disk layout is ``<root>/<subset>/ham/*.txt`` and
``<root>/<subset>/spam/*.txt``. A root that directly contains ``ham/`` and
``spam/`` is accepted as a single subset.
"""
from __future__ import annotations

import enum
import json
import logging
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ._rng import make_rng
from .errors import BalanceError, ConfigurationError, MalformedCorpusError, StratificationError

log = logging.getLogger(__name__)


class Label(enum.IntEnum):
    HAM = 0
    SPAM = 1

    @classmethod
    def parse(cls, value) -> "Label":
        if isinstance(value, Label):
            return value
        if isinstance(value, str):
            return cls[value.upper()]
        return cls(int(value))


@dataclass(frozen=True)
class Document:
    id: str
    label: Label
    raw_text: bytes
    subset: str = ""

    @property
    def text(self) -> str:
        # undecodable bytes become U+FFFD
        return self.raw_text.decode("utf-8", errors="replace")


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    class_counts: dict = field(init=False)
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        docs = tuple(self.documents)
        object.__setattr__(self, "documents", docs)
        ids = [d.id for d in docs]
        if len(set(ids)) != len(ids):
            dup = [i for i, c in Counter(ids).items() if c > 1][:3]
            raise MalformedCorpusError(f"duplicate document ids: {dup}")
        counts = Counter(d.label for d in docs)
        object.__setattr__(self, "class_counts", {Label.HAM: counts[Label.HAM], Label.SPAM: counts[Label.SPAM]})

    def __len__(self) -> int:
        return len(self.documents)

    @property
    def ids(self) -> list[str]:
        return [d.id for d in self.documents]

    def labels(self) -> dict[str, Label]:
        return {d.id: d.label for d in self.documents}

    def by_id(self) -> dict[str, Document]:
        return {d.id: d for d in self.documents}

    def subset(self, ids: Iterable[str]) -> "Corpus":
        keep = set(ids)
        return Corpus(tuple(d for d in self.documents if d.id in keep), metadata=dict(self.metadata))


def _read_class_dir(path: Path, subset: str, label: Label, skipped: list[str]) -> list[Document]:
    docs = []
    for f in sorted(path.iterdir()):
        if f.name.startswith(".") or not f.is_file() or f.suffix.lower() != ".txt":
            continue
        try:
            raw = f.read_bytes()
        except OSError as exc:
            log.warning("skipping unreadable file %s: %s", f, exc)
            skipped.append(str(f))
            continue
        docs.append(Document(id=f"{subset}/{label.name.lower()}/{f.name}", label=label, raw_text=raw, subset=subset))
    return docs


def load_corpus(root_path: str | os.PathLike) -> Corpus:
    """Read every ``ham``/``spam`` text file below ``root_path``.

    Documents are ordered by subset, label and file name. Files that cannot be
    read are skipped and counted in ``metadata["skipped"]``.
    """
    root = Path(root_path)
    if not root.is_dir():
        raise ConfigurationError(f"corpus root does not exist or is not a directory: {root}")

    if (root / "ham").is_dir() or (root / "spam").is_dir():
        subsets = [root]
    else:
        subsets = sorted(p for p in root.iterdir() if p.is_dir() and not p.name.startswith("."))
    if not subsets:
        raise MalformedCorpusError(f"no subset directories under {root}")

    skipped: list[str] = []
    docs: list[Document] = []
    for sub in subsets:
        name = sub.name
        ham, spam = sub / "ham", sub / "spam"
        if not ham.is_dir() and not spam.is_dir():
            raise MalformedCorpusError(f"subset {name!r} has neither ham/ nor spam/ directory")
        for label, path in ((Label.HAM, ham), (Label.SPAM, spam)):
            if path.is_dir():
                docs.extend(_read_class_dir(path, name, label, skipped))
    if not docs:
        raise MalformedCorpusError(f"no documents found under {root}")
    return Corpus(tuple(docs), metadata={"root": str(root), "skipped": len(skipped), "skipped_files": skipped})


def balance(corpus: Corpus, seed: int) -> Corpus:
    """Downsample the majority class to the minority count, without replacement.

    The minority class is untouched and document order is preserved. Applying
    it to an already balanced corpus returns the same membership.
    """
    by_class = {lab: [d.id for d in corpus.documents if d.label == lab] for lab in Label}
    n_ham, n_spam = len(by_class[Label.HAM]), len(by_class[Label.SPAM])
    if n_ham == 0 or n_spam == 0:
        raise BalanceError(f"cannot balance a corpus with class counts ham={n_ham}, spam={n_spam}")
    if n_ham == n_spam:
        return corpus
    major = Label.HAM if n_ham > n_spam else Label.SPAM
    target = min(n_ham, n_spam)
    rng = make_rng(seed)
    pool = sorted(by_class[major])
    chosen = rng.choice(len(pool), size=target, replace=False)
    keep = {pool[i] for i in chosen}
    docs = tuple(d for d in corpus.documents if d.label != major or d.id in keep)
    meta = dict(corpus.metadata)
    meta["balanced_from"] = {"ham": n_ham, "spam": n_spam}
    return Corpus(docs, metadata=meta)


@dataclass(frozen=True)
class SplitPlan:
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]
    folds: tuple[tuple[str, ...], ...]
    seed: int

    @property
    def k(self) -> int:
        return len(self.folds)

    def fold_train_ids(self, i: int) -> tuple[str, ...]:
        held = set(self.folds[i])
        return tuple(x for x in self.train_ids if x not in held)

    def to_json(self) -> str:
        return json.dumps({"seed": self.seed, "train_ids": list(self.train_ids),
                           "test_ids": list(self.test_ids), "folds": [list(f) for f in self.folds]}, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "SplitPlan":
        d = json.loads(text)
        return cls(tuple(d["train_ids"]), tuple(d["test_ids"]), tuple(tuple(f) for f in d["folds"]), int(d["seed"]))


def _train_allocation(sizes: Sequence[int], fraction: float) -> list[int]:
    # overall floor, distributed per class by largest remainder (ties to the earlier class)
    eps = 1e-9
    total = math.floor(fraction * sum(sizes) + eps)
    exact = [fraction * n for n in sizes]
    alloc = [min(n, math.floor(e + eps)) for n, e in zip(sizes, exact)]
    order = sorted(range(len(sizes)), key=lambda i: (-(exact[i] - alloc[i]), i))
    for i in order:
        if sum(alloc) >= total:
            break
        if alloc[i] < sizes[i]:
            alloc[i] += 1
    return alloc


def split(corpus: Corpus, train_fraction: float = 0.7, k: int = 5, seed: int = 0) -> SplitPlan:
    """Stratified train/test split plus ``k`` stratified folds over the train part.

    The train size is ``floor(train_fraction * n)``; it is shared between the
    classes in proportion to their size, with leftover documents going to the
    class with the largest fractional share. Folds deal each shuffled class
    round-robin, continuing from where the previous class stopped, so per-class
    fold counts differ by at most one.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ConfigurationError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if k < 2:
        raise ConfigurationError(f"fold count must be at least 2, got {k}")

    rng = make_rng(seed)
    per_class = [[d.id for d in corpus.documents if d.label == lab] for lab in Label]
    alloc = _train_allocation([len(c) for c in per_class], train_fraction)
    for lab, n_train in zip(Label, alloc):
        if n_train < k:
            raise StratificationError(
                f"class {lab.name.lower()} has {n_train} training documents, fewer than k={k} folds")

    train, test = [], []
    folds: list[list[str]] = [[] for _ in range(k)]
    offset = 0
    for ids, n_train in zip(per_class, alloc):
        perm = [ids[i] for i in rng.permutation(len(ids))]
        tr, te = perm[:n_train], perm[n_train:]
        train.extend(tr)
        test.extend(te)
        for j, doc_id in enumerate(tr):
            folds[(offset + j) % k].append(doc_id)
        offset = (offset + len(tr)) % k
    return SplitPlan(tuple(train), tuple(test), tuple(tuple(f) for f in folds), int(seed))

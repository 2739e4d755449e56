"""Top-N dictionary construction and bag-of-words count matrices."""
from __future__ import annotations

import csv
import hashlib
import io
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyDictionaryError
from .textprep import TokenStream


@dataclass(frozen=True)
class Dictionary:
    entries: tuple[tuple[str, int], ...]
    index: dict = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((str(w), int(c)) for w, c in self.entries))
        object.__setattr__(self, "index", {w: i for i, (w, _) in enumerate(self.entries)})

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(w for w, _ in self.entries)

    @property
    def fingerprint(self) -> str:
        return words_fingerprint(self.words)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rank", "word", "frequency"])
        for rank, (word, freq) in enumerate(self.entries, start=1):
            w.writerow([rank, word, freq])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Dictionary":
        rows = list(csv.DictReader(io.StringIO(text)))
        rows.sort(key=lambda r: int(r["rank"]))
        return cls(tuple((r["word"], int(r["frequency"])) for r in rows))


def words_fingerprint(words: Sequence[str]) -> str:
    return hashlib.sha256("\n".join(words).encode("utf-8")).hexdigest()[:16]


def build_dictionary(streams: Iterable[TokenStream], size: int = 200) -> Dictionary:
    """The ``size`` most frequent words over ``streams``.

    Ties in frequency are broken by ascending word so the result does not
    depend on stream order.
    """
    if size < 1:
        raise ValueError(f"dictionary size must be positive, got {size}")
    counts: Counter[str] = Counter()
    for s in streams:
        counts.update(s.tokens)
    if not counts:
        raise EmptyDictionaryError("training streams contain no tokens")
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return Dictionary(tuple(ranked[:size]))


def vectorize(stream: TokenStream | Sequence[str], dictionary: Dictionary) -> np.ndarray:
    if len(dictionary) == 0:
        raise EmptyDictionaryError("cannot vectorize against an empty dictionary")
    tokens = stream.tokens if isinstance(stream, TokenStream) else stream
    out = np.zeros(len(dictionary), dtype=np.int64)
    index = dictionary.index
    for tok in tokens:
        j = index.get(tok)
        if j is not None:
            out[j] += 1
    return out


@dataclass(frozen=True)
class FeatureMatrix:
    """Dense count matrix: one row per document, one column per dictionary word.

    ``labels`` holds 1 for spam and 0 for ham.
    """

    rows: tuple[str, ...]
    counts: np.ndarray
    labels: np.ndarray
    words: tuple[str, ...]

    def __post_init__(self):
        counts = np.asarray(self.counts)
        labels = np.asarray(self.labels, dtype=np.int64)
        if counts.ndim != 2 or counts.shape != (len(self.rows), len(self.words)):
            raise ValueError(f"counts shape {counts.shape} does not match {len(self.rows)} rows x {len(self.words)} words")
        if labels.shape != (len(self.rows),):
            raise ValueError("labels must have one entry per row")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "words", tuple(self.words))

    @property
    def fingerprint(self) -> str:
        return words_fingerprint(self.words)

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    def take(self, idx) -> "FeatureMatrix":
        idx = np.asarray(idx, dtype=np.int64)
        return FeatureMatrix(tuple(self.rows[i] for i in idx), self.counts[idx], self.labels[idx], self.words)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(self.words) + ["label"])
        for row, lab in zip(self.counts, self.labels):
            w.writerow([int(v) for v in row] + ["spam" if lab == 1 else "ham"])
        return buf.getvalue()


def build_matrix(streams: Sequence[TokenStream], labels: Sequence[int], dictionary: Dictionary) -> FeatureMatrix:
    counts = np.zeros((len(streams), len(dictionary)), dtype=np.int64)
    for i, s in enumerate(streams):
        counts[i] = vectorize(s, dictionary)
    return FeatureMatrix(tuple(s.doc_id for s in streams), counts, np.asarray([int(l) for l in labels]), dictionary.words)

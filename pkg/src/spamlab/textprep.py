"""Noise reduction and normalisation of raw email text.

The pipeline is ``strip_html -> tokenize -> drop short/numeric tokens ->
drop stop words -> drop noise words -> lemmatize``; every stage can be
switched off through :class:`PrepConfig`.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .corpus import Document

_TAG = re.compile(r"<[^<>]*>")
_ENTITY = re.compile(r"&(amp|lt|gt|quot|nbsp);")
_ENTITIES = {"amp": "&", "lt": "<", "gt": ">", "quot": '"', "nbsp": " "}
_SPLIT = re.compile(r"[^a-z0-9]+")
_VOWELS = frozenset("aeiou")

DEFAULT_NOISE_WORDS = frozenset({"subject", "cc", "to", "enron"})


def _data_text(name: str) -> str:
    return resources.files("spamlab").joinpath("data").joinpath(name).read_text(encoding="utf-8")


def _entries(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


@lru_cache(maxsize=None)
def default_stop_list() -> frozenset[str]:
    return frozenset(_entries(_data_text("stopwords.txt")))


@lru_cache(maxsize=None)
def lemma_exceptions() -> dict[str, str]:
    table: dict[str, str] = {}
    for line in _entries(_data_text("lemma_exceptions.txt")):
        form, lemma = line.split()
        if table.get(form, lemma) != lemma:
            raise ValueError(f"conflicting lemma entries for {form!r}")
        table[form] = lemma
    return table


def asset_hashes() -> dict[str, str]:
    """SHA-256 of the bundled data files, recorded in run reports."""
    return {name: hashlib.sha256(_data_text(name).encode("utf-8")).hexdigest()
            for name in ("stopwords.txt", "lemma_exceptions.txt")}


@dataclass(frozen=True)
class TokenStream:
    doc_id: str
    tokens: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class PrepConfig:
    strip_html: bool = True
    drop_short_numeric: bool = True
    remove_stopwords: bool = True
    remove_noise_words: bool = True
    lemmatize: bool = True
    stop_list: frozenset[str] = field(default_factory=default_stop_list)
    noise_words: frozenset[str] = DEFAULT_NOISE_WORDS

    @classmethod
    def raw(cls) -> "PrepConfig":
        """Every stage disabled: lowercase alphanumeric tokens only."""
        return cls(strip_html=False, drop_short_numeric=False, remove_stopwords=False,
                   remove_noise_words=False, lemmatize=False)

    def flags(self) -> dict[str, bool]:
        return {k: getattr(self, k) for k in
                ("strip_html", "drop_short_numeric", "remove_stopwords", "remove_noise_words", "lemmatize")}


def strip_html(raw: str) -> str:
    """Remove ``<...>`` tags and decode the entities amp, lt, gt, quot and nbsp.

    >>> strip_html("<b>win</b> cash")
    'win cash'
    """
    # an unterminated "<" never matches the tag pattern and survives
    text = _TAG.sub("", raw)
    return _ENTITY.sub(lambda m: _ENTITIES[m.group(1)], text)


def tokenize(text: str) -> list[str]:
    return [t for t in _SPLIT.split(text.lower()) if t]


def _has_vowel(s: str) -> bool:
    return any(c in _VOWELS for c in s)


def _is_cvc(s: str) -> bool:
    if len(s) < 3:
        return False
    a, b, c = s[-3], s[-2], s[-1]
    return a not in _VOWELS and b in _VOWELS and c not in _VOWELS and c not in "wxy"


def _vowel_groups(s: str) -> int:
    groups, prev = 0, False
    for ch in s:
        v = ch in _VOWELS
        if v and not prev:
            groups += 1
        prev = v
    return groups


def _repair(stem: str) -> str:
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS and stem[-1] not in "lsz":
        return stem[:-1]
    if stem.endswith(("bl", "iz", "v", "ur", "ir", "uc")):
        return stem + "e"
    if stem.endswith("at") and len(stem) >= 3 and stem[-3] not in _VOWELS:
        return stem + "e"
    if _vowel_groups(stem) == 1 and _is_cvc(stem):
        return stem + "e"
    return stem


def _strip_verbal(word: str, suffix: str) -> str | None:
    stem = word[: -len(suffix)]
    if suffix == "ed" and word.endswith("eed"):
        return None
    if not _has_vowel(stem):
        return None
    return _repair(stem)


def _step(word: str) -> str:
    # ordered suffix rules; the first whose guard passes wins
    rules = (
        ("ies", lambda w: w[:-3] + "y"),
        ("sses", lambda w: w[:-2]),
        ("xes", lambda w: w[:-2]),
        ("ches", lambda w: w[:-2]),
        ("shes", lambda w: w[:-2]),
        ("ing", lambda w: _strip_verbal(w, "ing")),
        ("ed", lambda w: _strip_verbal(w, "ed")),
        ("s", lambda w: None if w.endswith(("ss", "us", "is")) else w[:-1]),
    )
    for suffix, rule in rules:
        if word.endswith(suffix):
            out = rule(word)
            if out is not None and len(out) >= 3:
                return out
    return word


def lemmatize(token: str) -> str:
    """Reduce an inflected lowercase word to a base form.

    The exception table is consulted first; otherwise suffix rules apply one
    at a time until the word stops changing, which makes the function
    idempotent.

    >>> lemmatize("following"), lemmatize("impacted"), lemmatize("gas")
    ('follow', 'impact', 'gas')
    """
    table = lemma_exceptions()
    word = token
    while True:
        if word in table:
            return table[word]
        nxt = _step(word)
        if nxt == word:
            return word
        word = nxt


def _is_numeric(tok: str) -> bool:
    return tok.isdigit()


def preprocess_text(text: str, cfg: PrepConfig | None = None) -> list[str]:
    cfg = cfg or PrepConfig()
    if cfg.strip_html:
        text = strip_html(text)
    tokens = tokenize(text)
    if cfg.drop_short_numeric:
        tokens = [t for t in tokens if len(t) > 1 and not _is_numeric(t)]
    if cfg.remove_stopwords:
        tokens = [t for t in tokens if t not in cfg.stop_list]
    if cfg.remove_noise_words:
        tokens = [t for t in tokens if t not in cfg.noise_words]
    if cfg.lemmatize:
        tokens = [lemmatize(t) for t in tokens]
    return tokens


def preprocess(doc: Document, cfg: PrepConfig | None = None) -> TokenStream:
    return TokenStream(doc.id, tuple(preprocess_text(doc.text, cfg)))

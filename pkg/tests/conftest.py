import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spamlab import toy_corpus_path
from spamlab.corpus import load_corpus
from spamlab.textprep import preprocess
from spamlab.vectorize import build_dictionary, build_matrix

ENRON_ENV = "ENRON_CORPUS_DIR"


def enron_root():
    """The full Enron corpus directory, or None when it is not available."""
    root = os.environ.get(ENRON_ENV)
    return root if root and Path(root).is_dir() else None


requires_enron = pytest.mark.skipif(enron_root() is None, reason=f"{ENRON_ENV} not set to the Enron corpus")


@pytest.fixture(scope="session")
def toy_root():
    return Path(str(toy_corpus_path()))


@pytest.fixture(scope="session")
def toy_corpus(toy_root):
    return load_corpus(toy_root)


@pytest.fixture(scope="session")
def toy_matrix(toy_corpus):
    streams = [preprocess(d) for d in toy_corpus.documents]
    dictionary = build_dictionary(streams, 200)
    return build_matrix(streams, [int(d.label) for d in toy_corpus.documents], dictionary)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def write_corpus(root: Path, ham, spam, subset="s1"):
    """Write documents to ``root/subset/{ham,spam}/NNNN.txt``; returns ``root``."""
    for label, docs in (("ham", ham), ("spam", spam)):
        d = root / subset / label
        d.mkdir(parents=True, exist_ok=True)
        for i, text in enumerate(docs):
            data = text if isinstance(text, bytes) else text.encode("utf-8")
            (d / f"{i:04d}.txt").write_bytes(data)
    return root


# -- acceptance report -------------------------------------------------------------

ACCEPTANCE_LINES: dict[str, str] = {}


def record_criterion(number: str, status: str, detail: str) -> None:
    """Remember one PASS/FAIL/SKIP line; all lines are printed at the end of the session."""
    line = f"CRITERION {number:>3s}: {status:4s}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])

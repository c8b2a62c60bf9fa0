import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "data" / "corpus"
ATTRACTORS = ROOT / "data" / "attractors"


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture
def attractor_dir() -> Path:
    return ATTRACTORS

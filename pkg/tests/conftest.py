from __future__ import annotations

from pathlib import Path

import pytest

from synthdata import generate_corpus

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def pan_fixture() -> Path:
    """Bundled 20-document dataset with hand-written truth files."""
    return FIXTURES / "pan_dataset"


@pytest.fixture(scope="session")
def synth_corpus(tmp_path_factory: pytest.TempPathFactory) -> Path:
    """Two-style synthetic corpus shared by the end-to-end tests."""
    root = tmp_path_factory.mktemp("synth_corpus")
    return generate_corpus(root, difficulty="easy", n_train=100, n_validation=50, seed=77)

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from model_fixtures import CORPUS_LINES, build_model_dir


@pytest.fixture(scope="session")
def model_dir_768(tmp_path_factory):
    # full-width hidden size, shallow stack: big enough to prove the
    # 768-dim contract, small enough for CPU tests
    return build_model_dir(
        tmp_path_factory.mktemp("model768"), hidden_size=768, layers=4, heads=8,
        intermediate=512,
    )


@pytest.fixture(scope="session")
def model_dir_small(tmp_path_factory):
    return build_model_dir(
        tmp_path_factory.mktemp("model32"), hidden_size=32, layers=4, heads=2,
        intermediate=64,
    )


@pytest.fixture
def corpus_file(tmp_path):
    path = tmp_path / "corpus.txt"
    path.write_text("\n".join(CORPUS_LINES) + "\n", encoding="utf-8")
    return path

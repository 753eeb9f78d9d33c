import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import DATA_DIR, circle_entries
from wordgraph.embeddings import EmbeddingTable


@pytest.fixture
def circle_table() -> EmbeddingTable:
    return EmbeddingTable(2, circle_entries())


@pytest.fixture
def golden_dir() -> Path:
    return DATA_DIR / "golden"

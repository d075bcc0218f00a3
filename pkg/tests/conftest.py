import json
from pathlib import Path

import pytest

from stakenli.core import default_registry

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def registry():
    return default_registry()


@pytest.fixture(scope="session")
def gold_labels(data_dir):
    golds = {}
    for line in (data_dir / "gold_labels.jsonl").read_text(encoding="utf-8").splitlines():
        record = json.loads(line)
        golds[(record["entity_phrase"], record["topic"])] = record["label"]
    return golds

import json
import warnings
from pathlib import Path

import pytest

warnings.filterwarnings("ignore", message="Using `httpx` with `starlette")

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


def make_toy_dataset(path: Path, n: int = 50) -> Path:
    """A 50-instance compiled-NLI-format file with separable content."""
    subjects = ["rbi", "modi", "gandhi", "paytm", "patel"]
    labels = ["banking sector", "government", "opposition", "private companies",
              "bureaucrat"]
    with path.open("w", encoding="utf-8") as fh:
        count = 0
        while count < n:
            i = count % 5
            other = (i + 1 + (count // 5) % 4) % 5
            for candidate, gold in ((i, 1), (other, 0)):
                if count >= n:
                    break
                fh.write(json.dumps({
                    "group_id": f"g{count:03d}",
                    "premise": f"the {subjects[i]} news report mentions "
                               f"{labels[i]} matters today",
                    "hypothesis": f"the entity {subjects[i]} belongs to the "
                                  f"stakeholder group of {labels[candidate]}",
                    "label": gold,
                    "entity_phrase": subjects[i],
                    "stakeholder": labels[candidate],
                    "template_id": "original",
                }) + "\n")
                count += 1
    return path


@pytest.fixture
def toy_dataset(tmp_path):
    return make_toy_dataset(tmp_path / "nli.jsonl")

"""Regenerate the derived test fixtures under tests/data/.

Hand-authored inputs (corpus.jsonl, gazetteer.json, gold_labels.jsonl) stay
untouched. Derived artifacts (knowledge cache entries, the 30-example labeled
file, golden descriptions and predictions) are rebuilt from them. Run from the
repository root after any deliberate pipeline behavior change, then re-audit
the goldens by hand before committing.
"""

import json
import subprocess
import sys
from pathlib import Path

from stakenli.core import default_registry
from stakenli.knowledge import KnowledgeCache, PageRef

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"

CACHE_PAGES = [
    PageRef(
        title="Reserve Bank of India",
        url="https://en.wikipedia.org/wiki/Reserve_Bank_of_India",
        summary=(
            "The Reserve Bank of India steers the banking sector of the country. "
            "It issues currency and sets lending rules. Its offices sit in Mumbai."
        ),
    ),
    PageRef(
        title="Supreme Court of India",
        url="https://en.wikipedia.org/wiki/Supreme_Court_of_India",
        summary=(
            "The Supreme Court of India heads the judiciary of the country. "
            "It hears appeals from the high courts across the land. "
            "Its seat is in New Delhi."
        ),
    ),
]

# train topic: Demonetization; eval topic: Article 370. labels present only in
# the eval topic are the zero-shot (unseen) ones and never reach compile.
TRAIN_TOPIC = "Demonetization"
UNSEEN_LABELS = {"Judiciary", "Kashmiri people", "International-figure"}


def build_cache():
    cache_dir = DATA / "cache"
    cache_dir.mkdir(parents=True, exist_ok=True)
    for old in cache_dir.glob("*.json"):
        old.unlink()
    cache = KnowledgeCache(cache_dir)
    for page in CACHE_PAGES:
        cache.put(page.title, page)
    print(f"cache: {len(CACHE_PAGES)} entries in {cache_dir}")


def build_labeled_30():
    registry = default_registry()
    out = DATA / "labeled_30.jsonl"
    with out.open("w", encoding="utf-8") as fh:
        for topic in registry.known_topics:
            candidates = [c.name for c in registry.candidates_for_topic(topic)]
            for j in range(6):
                slug = topic.lower().replace(" ", "-")
                phrase = f"Actor {j} of {topic}"
                record = {
                    "entity_phrase": phrase,
                    "description": {
                        "snippets": [
                            {
                                "doc_id": f"{slug}-doc{j}",
                                "sentence_index": 0,
                                "text": f"{phrase} appeared in coverage item {j}.",
                            }
                        ]
                    },
                    "label": candidates[j % len(candidates)],
                    "topic": topic,
                }
                fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
    print(f"labeled_30: 30 examples in {out}")


def run_cli(*args):
    cmd = [sys.executable, "-m", "stakenli.cli", *args]
    subprocess.run(cmd, check=True, cwd=ROOT)


def build_goldens():
    describe_out = DATA / "golden_descriptions.jsonl"
    run_cli(
        "describe",
        str(DATA / "corpus.jsonl"),
        "--gazetteer",
        str(DATA / "gazetteer.json"),
        "--cache-dir",
        str(DATA / "cache"),
        "--offline",
        "--jobs",
        "1",
        "-o",
        str(describe_out),
    )

    golds = {}
    for line in (DATA / "gold_labels.jsonl").read_text(encoding="utf-8").splitlines():
        record = json.loads(line)
        golds[record["entity_phrase"]] = record["label"]

    paths = {
        "train": DATA / "descriptions_train.jsonl",
        "seen": DATA / "descriptions_seen.jsonl",
        "unseen": DATA / "descriptions_unseen.jsonl",
    }
    handles = {k: p.open("w", encoding="utf-8") for k, p in paths.items()}
    for line in describe_out.read_text(encoding="utf-8").splitlines():
        record = json.loads(line)
        if record["topic"] == TRAIN_TOPIC:
            split = "train"
        elif golds[record["entity_phrase"]] in UNSEEN_LABELS:
            split = "unseen"
        else:
            split = "seen"
        handles[split].write(line + "\n")
    for fh in handles.values():
        fh.close()

    for split in ("seen", "unseen"):
        run_cli(
            "classify",
            str(paths[split]),
            "-o",
            str(DATA / f"golden_predictions_{split}.jsonl"),
        )
    for manifest in DATA.glob("*.manifest.json"):
        manifest.unlink()
    print("goldens rebuilt; audit the predicted labels before committing")


if __name__ == "__main__":
    build_cache()
    build_labeled_30()
    build_goldens()

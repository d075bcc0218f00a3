"""Corpus and labeled-dataset loading, keyword topic filtering, split construction."""

from __future__ import annotations

import datetime
import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path

from .core import Document, EntityDescription, LabelRegistry, Snippet
from .errors import DatasetError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    topic: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)


@dataclass(frozen=True)
class LabeledExample:
    entity_phrase: str
    description: EntityDescription
    label: str
    topic: str


@dataclass(frozen=True)
class DatasetSplits:
    train: tuple[LabeledExample, ...]
    dev: tuple[LabeledExample, ...]
    test_seen: tuple[LabeledExample, ...]
    test_unseen: tuple[LabeledExample, ...]

    def labels_of(self, split: str) -> set[str]:
        return {ex.label for ex in getattr(self, split)}


def _iter_jsonl(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DatasetError(f"file not found: {path}")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            yield lineno, json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"{path}: malformed JSON on line {lineno}: {exc.msg}")


def load_corpus(path) -> Corpus:
    """Load a line-delimited JSON corpus; one document object per line."""
    path = Path(path)
    documents = []
    seen_ids = {}
    for lineno, record in _iter_jsonl(path):
        try:
            doc = Document(
                id=record["id"],
                topic=record["topic"],
                title=record["title"],
                text=record["text"],
                source=record.get("source", ""),
                date=record.get("date"),
            )
        except KeyError as exc:
            raise DatasetError(f"{path}: line {lineno}: missing field {exc}")
        except ValueError as exc:
            raise DatasetError(f"{path}: line {lineno}: {exc}")
        if doc.date is not None:
            try:
                datetime.date.fromisoformat(doc.date)
            except ValueError:
                raise DatasetError(
                    f"{path}: line {lineno}: date {doc.date!r} is not ISO-8601"
                )
        if doc.id in seen_ids:
            raise DatasetError(
                f"{path}: line {lineno}: duplicate document id {doc.id!r} "
                f"(first seen on line {seen_ids[doc.id]})"
            )
        seen_ids[doc.id] = lineno
        documents.append(doc)
    if not documents:
        log.warning("corpus %s is empty", path)
    else:
        log.info("loaded %d documents from %s", len(documents), path)
    topics = {d.topic for d in documents}
    return Corpus(tuple(documents), topic=topics.pop() if len(topics) == 1 else None)


def write_corpus(corpus: Corpus, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for doc in corpus:
            record = {
                "id": doc.id,
                "topic": doc.topic,
                "title": doc.title,
                "text": doc.text,
                "source": doc.source,
            }
            if doc.date is not None:
                record["date"] = doc.date
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")


def filter_by_topic(corpus: Corpus, include_keywords: list[str], min_hits: int = 1) -> Corpus:
    """Retain documents whose lowercased text contains >= min_hits distinct keywords."""
    if not include_keywords:
        raise DatasetError("keyword list must be non-empty")
    if min_hits < 1:
        raise DatasetError("min_hits must be a positive integer")
    keywords = [k.lower() for k in include_keywords]
    kept = []
    for doc in corpus:
        text = doc.text.lower()
        hits = sum(1 for k in set(keywords) if k in text)
        if hits >= min_hits:
            kept.append(doc)
    return Corpus(tuple(kept), topic=corpus.topic)


def _description_from_record(record: dict, where: str) -> EntityDescription:
    desc = record.get("description")
    if not isinstance(desc, dict):
        raise DatasetError(f"{where}: missing or invalid 'description' object")
    snippets = tuple(
        Snippet(s["doc_id"], int(s["sentence_index"]), s["text"])
        for s in desc.get("snippets", [])
    )
    if not snippets:
        raise DatasetError(f"{where}: description has no snippets")
    return EntityDescription(
        entity_name=record["entity_phrase"],
        snippets=snippets,
        background=desc.get("background"),
    )


def load_labeled(path, registry: LabelRegistry) -> list[LabeledExample]:
    """Load labeled examples, validating every label against the registry."""
    path = Path(path)
    examples = []
    for lineno, record in _iter_jsonl(path):
        where = f"{path}: line {lineno}"
        try:
            label = record["label"]
            topic = record["topic"]
            phrase = record["entity_phrase"]
        except KeyError as exc:
            raise DatasetError(f"{where}: missing field {exc}")
        if label not in registry:
            raise DatasetError(
                f"{where}: unknown label {label!r} for entity {phrase!r}; "
                f"registry has: {', '.join(registry.names)}"
            )
        examples.append(
            LabeledExample(
                entity_phrase=phrase,
                description=_description_from_record(record, where),
                label=label,
                topic=topic,
            )
        )
    return examples


def write_labeled(examples, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for ex in examples:
            desc = {
                "snippets": [
                    {"doc_id": s.doc_id, "sentence_index": s.sentence_index, "text": s.text}
                    for s in ex.description.snippets
                ]
            }
            if ex.description.background is not None:
                desc["background"] = ex.description.background
            record = {
                "entity_phrase": ex.entity_phrase,
                "description": desc,
                "label": ex.label,
                "topic": ex.topic,
            }
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")


def make_splits(
    examples: list[LabeledExample],
    unseen_labels: set[str],
    dev_fraction: float,
    seed: int,
    test_fraction: float | None = None,
) -> DatasetSplits:
    """Partition examples into train/dev/test_seen/test_unseen.

    Every example whose label is in ``unseen_labels`` goes to test_unseen.
    The rest split per label (stratified) so each seen label lands in train,
    then dev, then test_seen. ``test_fraction`` defaults to ``dev_fraction``.
    """
    if not 0.0 < dev_fraction < 1.0:
        raise DatasetError("dev_fraction must lie strictly between 0 and 1")
    if test_fraction is None:
        test_fraction = dev_fraction
    if not 0.0 <= test_fraction < 1.0:
        raise DatasetError("test_fraction must lie in [0, 1)")
    all_labels = {ex.label for ex in examples}
    stray = set(unseen_labels) - all_labels
    if stray:
        raise DatasetError(
            f"unseen labels not present in the data: {', '.join(sorted(stray))}"
        )
    if all_labels and all_labels <= set(unseen_labels):
        raise DatasetError("unseen_labels cover every label; train would be empty")

    test_unseen = [ex for ex in examples if ex.label in unseen_labels]
    seen = [ex for ex in examples if ex.label not in unseen_labels]

    by_label: dict[str, list[LabeledExample]] = {}
    for ex in seen:
        by_label.setdefault(ex.label, []).append(ex)

    rng = random.Random(seed)
    train, dev, test_seen = [], [], []
    for label in sorted(by_label):
        group = list(by_label[label])
        rng.shuffle(group)
        n = len(group)
        n_dev = int(dev_fraction * n)
        if n_dev == 0 and n >= 2:
            n_dev = 1
        n_test = int(test_fraction * n)
        # train keeps at least one example of every seen label
        while n - n_dev - n_test < 1 and n_test > 0:
            n_test -= 1
        while n - n_dev - n_test < 1 and n_dev > 0:
            n_dev -= 1
        train.extend(group[: n - n_dev - n_test])
        dev.extend(group[n - n_dev - n_test : n - n_test])
        test_seen.extend(group[n - n_test :])

    return DatasetSplits(
        train=tuple(train),
        dev=tuple(dev),
        test_seen=tuple(test_seen),
        test_unseen=tuple(test_unseen),
    )

"""Shared domain types, the stakeholder label registry, and pipeline configuration."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError, RegistryError

STAKEHOLDER_KINDS = ("Person", "GeopoliticalEntity", "Organization", "Other")


@dataclass(frozen=True)
class StakeholderLabel:
    """One stakeholder type; topic-specific labels apply only to their topics."""

    name: str
    topic_specific: bool = False
    topics: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.name:
            raise RegistryError("label name must be non-empty")
        object.__setattr__(self, "topics", frozenset(self.topics))
        if self.topic_specific and not self.topics:
            raise RegistryError(
                f"topic-specific label {self.name!r} must list at least one topic"
            )

    def applies_to(self, topic: str) -> bool:
        return not self.topic_specific or topic in self.topics


class LabelRegistry:
    """Ordered set of stakeholder labels with per-topic candidate lookup."""

    def __init__(self, labels):
        labels = tuple(labels)
        seen = set()
        for label in labels:
            if label.name in seen:
                raise RegistryError(f"duplicate label name: {label.name!r}")
            seen.add(label.name)
        self.labels = labels

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(label.name for label in self.labels)

    @property
    def known_topics(self) -> tuple[str, ...]:
        topics = []
        for label in self.labels:
            for topic in sorted(label.topics):
                if topic not in topics:
                    topics.append(topic)
        return tuple(topics)

    def __contains__(self, name: str) -> bool:
        return any(label.name == name for label in self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def candidates_for_topic(self, topic: str) -> list[StakeholderLabel]:
        if topic not in self.known_topics:
            raise RegistryError(
                f"unknown topic {topic!r}; known topics: {', '.join(self.known_topics)}"
            )
        return [label for label in self.labels if label.applies_to(topic)]

    def serialize(self) -> str:
        """Canonical rendering: fixed key order, sorted topics, 2-space indent."""
        payload = {
            "labels": [
                {
                    "name": label.name,
                    "topic_specific": label.topic_specific,
                    "topics": sorted(label.topics),
                }
                for label in self.labels
            ]
        }
        return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"

    def __eq__(self, other):
        return isinstance(other, LabelRegistry) and self.labels == other.labels


def load_label_registry(path) -> LabelRegistry:
    """Load a registry file: {"labels": [{"name", "topic_specific", "topics"}]}."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise RegistryError(f"registry file not found: {path}")
    except json.JSONDecodeError as exc:
        raise RegistryError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    if not isinstance(raw, dict) or "labels" not in raw:
        raise RegistryError(f"{path}: expected an object with a 'labels' field")
    labels = []
    for i, entry in enumerate(raw["labels"]):
        try:
            labels.append(
                StakeholderLabel(
                    name=entry["name"],
                    topic_specific=bool(entry.get("topic_specific", False)),
                    topics=frozenset(entry.get("topics", [])),
                )
            )
        except KeyError as exc:
            raise RegistryError(f"{path}: label #{i} missing field {exc}")
    return LabelRegistry(labels)


def candidates_for_topic(registry: LabelRegistry, topic: str) -> list[StakeholderLabel]:
    return registry.candidates_for_topic(topic)


def default_registry_path() -> Path:
    return Path(__file__).parent / "data" / "registry_default.json"


def default_registry() -> LabelRegistry:
    return load_label_registry(default_registry_path())


@dataclass(frozen=True)
class Document:
    """One news article; spans elsewhere index the UTF-8 encoding of ``text``."""

    id: str
    topic: str
    title: str
    text: str
    source: str = ""
    date: str | None = None

    def __post_init__(self):
        if not self.text:
            raise ValueError(f"document {self.id!r} has empty text")


@dataclass(frozen=True)
class EntityMention:
    surface: str
    entity_kind: str
    doc_id: str
    char_span: tuple[int, int]  # half-open byte offsets into the document text
    sentence_index: int

    def __post_init__(self):
        if self.entity_kind not in STAKEHOLDER_KINDS:
            raise ValueError(f"unknown entity kind: {self.entity_kind!r}")


def mention_text(doc: Document, mention: EntityMention) -> str:
    start, end = mention.char_span
    return doc.text.encode("utf-8")[start:end].decode("utf-8")


@dataclass(frozen=True)
class Snippet:
    doc_id: str
    sentence_index: int
    text: str


@dataclass(frozen=True)
class EntityDescription:
    """Aggregated description: optional background followed by context snippets."""

    entity_name: str
    snippets: tuple[Snippet, ...]
    background: str | None = None

    def __post_init__(self):
        if not self.snippets:
            raise ValueError(f"description for {self.entity_name!r} has no snippets")
        object.__setattr__(self, "snippets", tuple(self.snippets))

    @property
    def rendered(self) -> str:
        parts = [] if self.background is None else [self.background]
        parts.extend(s.text for s in self.snippets)
        return " ".join(parts)


@dataclass(frozen=True)
class PipelineConfig:
    saliency_min_mentions: int = 2
    jw_threshold: float = 0.85
    jw_prefix_scale: float = 0.1
    max_premise_chars: int = 2000
    background_sentences: int = 3
    template_id: str = "original"

    def __post_init__(self):
        if self.saliency_min_mentions < 1:
            raise ConfigError("saliency_min_mentions must be a positive integer")
        if not 0.0 <= self.jw_threshold <= 1.0:
            raise ConfigError("jw_threshold must lie in [0, 1]")
        if not 0.0 <= self.jw_prefix_scale <= 0.25:
            raise ConfigError("jw_prefix_scale must lie in [0, 0.25]")
        if self.max_premise_chars < 1:
            raise ConfigError("max_premise_chars must be a positive integer")
        if self.background_sentences < 1:
            raise ConfigError("background_sentences must be a positive integer")
        if not 0.8 <= self.jw_threshold <= 0.9:
            warnings.warn(
                f"jw_threshold {self.jw_threshold} is outside the recommended "
                "[0.8, 0.9] range",
                stacklevel=2,
            )

    @classmethod
    def from_dict(cls, overrides: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**overrides)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

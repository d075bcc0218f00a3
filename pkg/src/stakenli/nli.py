"""Compile labeled examples into premise/hypothesis entailment instances.

Each example expands into one instance per candidate label for its topic:
label 1 for the annotated stakeholder, 0 for every other candidate.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass
from pathlib import Path

from .core import LabelRegistry, StakeholderLabel
from .errors import DatasetError, TemplateError
from .ingest import LabeledExample

_PLACEHOLDER_RE = re.compile(r"\{e\}|\{S\}")


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    pattern: str

    def __post_init__(self):
        for placeholder in ("{e}", "{S}"):
            count = self.pattern.count(placeholder)
            if count != 1:
                raise TemplateError(
                    f"template {self.id!r} must contain {placeholder} exactly once "
                    f"(found {count})"
                )


@dataclass(frozen=True)
class NLIInstance:
    group_id: str
    premise: str
    hypothesis: str
    label: int  # 1 entail, 0 not-entail
    entity_phrase: str
    stakeholder: str
    template_id: str


def default_templates_path() -> Path:
    return Path(__file__).parent / "data" / "templates.json"


def load_templates(path=None) -> dict[str, PromptTemplate]:
    """Load the template registry; ships with ids original, template1, template2."""
    path = Path(path) if path is not None else default_templates_path()
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise TemplateError(f"template file not found: {path}")
    except json.JSONDecodeError as exc:
        raise TemplateError(f"{path}: invalid JSON: {exc.msg}")
    templates = {}
    for entry in raw:
        template = PromptTemplate(id=entry["id"], pattern=entry["pattern"])
        if template.id in templates:
            raise TemplateError(f"{path}: duplicate template id {template.id!r}")
        templates[template.id] = template
    return templates


def get_template(template_id: str, path=None) -> PromptTemplate:
    templates = load_templates(path)
    if template_id not in templates:
        raise TemplateError(
            f"unknown template {template_id!r}; available: {', '.join(templates)}"
        )
    return templates[template_id]


def render_prompt(template: PromptTemplate, entity: str, label: str) -> str:
    """Substitute {e} and {S} simultaneously; no other interpretation of the pattern."""
    if not entity or not label:
        raise ValueError("entity and label must be non-empty")
    return _PLACEHOLDER_RE.sub(
        lambda m: entity if m.group() == "{e}" else label, template.pattern
    )


def to_nli(
    example: LabeledExample,
    candidates: list[StakeholderLabel],
    template: PromptTemplate,
    group_id: str | None = None,
) -> list[NLIInstance]:
    """Expand one labeled example into one instance per candidate label."""
    names = [c.name for c in candidates]
    if example.label not in names:
        raise DatasetError(
            f"gold label {example.label!r} for entity {example.entity_phrase!r} "
            f"is not among the candidates: {', '.join(names)}"
        )
    if group_id is None:
        group_id = f"{example.topic}:{example.entity_phrase}"
    premise = example.description.rendered
    return [
        NLIInstance(
            group_id=group_id,
            premise=premise,
            hypothesis=render_prompt(template, example.entity_phrase, name),
            label=1 if name == example.label else 0,
            entity_phrase=example.entity_phrase,
            stakeholder=name,
            template_id=template.id,
        )
        for name in names
    ]


def compile_dataset(
    examples: list[LabeledExample],
    registry: LabelRegistry,
    template: PromptTemplate,
) -> list[NLIInstance]:
    """Expand every example against its topic's candidate set, in input order."""
    instances = []
    for i, example in enumerate(examples):
        candidates = registry.candidates_for_topic(example.topic)
        instances.extend(
            to_nli(example, candidates, template, group_id=f"g{i:05d}")
        )
    return instances


def write_nli(instances: list[NLIInstance], path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(asdict(inst), sort_keys=True, ensure_ascii=False) + "\n")


def read_nli(path) -> list[NLIInstance]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DatasetError(f"file not found: {path}")
    instances = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            instances.append(
                NLIInstance(
                    group_id=record["group_id"],
                    premise=record["premise"],
                    hypothesis=record["hypothesis"],
                    label=int(record["label"]),
                    entity_phrase=record["entity_phrase"],
                    stakeholder=record["stakeholder"],
                    template_id=record["template_id"],
                )
            )
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise DatasetError(f"{path}: malformed NLI record on line {lineno}: {exc}")
    return instances

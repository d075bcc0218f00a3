"""Macro precision/recall/F1 over splits, plus the template robustness harness."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .core import LabelRegistry, PipelineConfig
from .errors import InputError
from .nli import PromptTemplate
from .zeroshot import EntailmentScorer, classify_single


@dataclass
class ConfusionTable:
    """Per-label true-positive / false-positive / false-negative counts."""

    universe: tuple[str, ...]
    tp: dict[str, int] = field(default_factory=dict)
    fp: dict[str, int] = field(default_factory=dict)
    fn: dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_predictions(cls, golds, preds, universe) -> "ConfusionTable":
        table = cls(universe=tuple(universe))
        for label in table.universe:
            table.tp[label] = table.fp[label] = table.fn[label] = 0
        for gold, pred in zip(golds, preds):
            if gold == pred:
                table.tp[gold] += 1
            else:
                table.fn[gold] += 1
                if pred in table.fp:  # predictions outside the universe count
                    table.fp[pred] += 1  # only as misses on the gold label
        return table


@dataclass(frozen=True)
class LabelMetrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    split: str
    n_examples: int
    template_id: str
    backend: str
    per_label: dict[str, LabelMetrics]
    macro_precision: float
    macro_recall: float
    macro_f1: float

    def to_dict(self) -> dict:
        return {
            "split": self.split,
            "n_examples": self.n_examples,
            "template_id": self.template_id,
            "backend": self.backend,
            "per_label": {
                name: {"precision": m.precision, "recall": m.recall, "f1": m.f1}
                for name, m in self.per_label.items()
            },
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)


def _metrics(tp: int, fp: int, fn: int) -> LabelMetrics:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return LabelMetrics(precision=precision, recall=recall, f1=f1)


def score_predictions(
    golds: list[str],
    preds: list[str],
    universe: list[str],
    split: str = "",
    template_id: str = "",
    backend: str = "",
) -> EvalReport:
    """Per-label and unweighted-macro P/R/F1 over the given label universe."""
    if len(golds) != len(preds):
        raise InputError(
            f"gold/prediction length mismatch: {len(golds)} vs {len(preds)}"
        )
    unknown = set(golds) - set(universe)
    if unknown:
        raise InputError(f"gold labels outside the universe: {', '.join(sorted(unknown))}")
    table = ConfusionTable.from_predictions(golds, preds, universe)
    per_label = {
        name: _metrics(table.tp[name], table.fp[name], table.fn[name])
        for name in table.universe
    }
    n = len(per_label)
    return EvalReport(
        split=split,
        n_examples=len(golds),
        template_id=template_id,
        backend=backend,
        per_label=per_label,
        macro_precision=sum(m.precision for m in per_label.values()) / n,
        macro_recall=sum(m.recall for m in per_label.values()) / n,
        macro_f1=sum(m.f1 for m in per_label.values()) / n,
    )


def evaluate_split(
    examples,
    registry: LabelRegistry,
    template: PromptTemplate,
    scorer: EntailmentScorer,
    config: PipelineConfig | None = None,
    split: str = "",
) -> EvalReport:
    """Classify every example against its topic's candidates and score the result."""
    if not examples:
        raise InputError("cannot evaluate an empty split")
    golds, preds = [], []
    for example in examples:
        candidates = registry.candidates_for_topic(example.topic)
        result = classify_single(example.description, candidates, template, scorer)
        golds.append(example.label)
        preds.append(result.predicted)
    universe = []
    for gold in golds:
        if gold not in universe:
            universe.append(gold)
    return score_predictions(
        golds,
        preds,
        universe,
        split=split,
        template_id=template.id,
        backend=getattr(scorer, "name", type(scorer).__name__),
    )


@dataclass(frozen=True)
class RobustnessReport:
    per_template: dict[str, EvalReport]
    max_spread: float

    def to_dict(self) -> dict:
        return {
            "per_template": {
                tid: report.to_dict() for tid, report in self.per_template.items()
            },
            "max_spread": self.max_spread,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)


def robustness_sweep(
    examples,
    registry: LabelRegistry,
    templates: list[PromptTemplate],
    scorer: EntailmentScorer,
    config: PipelineConfig | None = None,
    split: str = "",
) -> RobustnessReport:
    """Evaluate the split under each template and report the macro-F1 spread."""
    if len(templates) < 2:
        raise InputError("robustness sweep needs at least two templates")
    per_template = {
        t.id: evaluate_split(examples, registry, t, scorer, config, split=split)
        for t in templates
    }
    f1s = [r.macro_f1 for r in per_template.values()]
    return RobustnessReport(per_template=per_template, max_spread=max(f1s) - min(f1s))

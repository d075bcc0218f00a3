"""Entailment scoring backends.

``rule:overlap`` is a deterministic token-overlap backend used for protocol
tests and offline development. Anything else is treated as a Hugging Face
model id or checkpoint path: the sequence-classification head is mapped to an
entailment probability by softmaxing the logits and taking the component
whose label name contains "entail" (the MNLI convention, and the convention
our fine-tuned binary checkpoints use).
"""

from __future__ import annotations

import re
from typing import Protocol

from .config import BackendConfig, SidecarError

_TOKEN_RE = re.compile(r"\w+")


class EntailmentBackend(Protocol):
    name: str

    def score_pairs(self, pairs: list[tuple[str, str]]) -> list[float]: ...


class OverlapEntailmentBackend:
    """Fraction of hypothesis tokens present in the premise; no model involved."""

    name = "rule:overlap"

    def score_pairs(self, pairs):
        scores = []
        for premise, hypothesis in pairs:
            premise_tokens = set(_TOKEN_RE.findall(premise.lower()))
            hypothesis_tokens = set(_TOKEN_RE.findall(hypothesis.lower()))
            if not hypothesis_tokens:
                scores.append(0.0)
            else:
                scores.append(len(premise_tokens & hypothesis_tokens) / len(hypothesis_tokens))
        return scores


def entailment_label_index(id2label: dict) -> int:
    for index, label in id2label.items():
        if "entail" in str(label).lower() and "not" not in str(label).lower():
            return int(index)
    raise SidecarError(
        f"cannot locate an entailment class among labels {dict(id2label)!r}; "
        "expected a label containing 'entail'"
    )


class HFEntailmentBackend:
    """Transformer sequence-pair classifier mapped to entailment probabilities."""

    def __init__(self, config: BackendConfig):
        import torch
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        self.config = config
        self.name = config.model
        self.torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(config.model)
        self.model = AutoModelForSequenceClassification.from_pretrained(config.model)
        self.model.to(config.device)
        self.model.eval()
        self.entail_index = entailment_label_index(self.model.config.id2label)

    def score_pairs(self, pairs):
        torch = self.torch
        scores = []
        for start in range(0, len(pairs), self.config.batch_size):
            batch = pairs[start : start + self.config.batch_size]
            encoded = self.tokenizer(
                [p for p, _ in batch],
                [h for _, h in batch],
                truncation=True,
                max_length=self.config.max_seq_length,
                padding=True,
                return_tensors="pt",
            ).to(self.config.device)
            with torch.no_grad():
                logits = self.model(**encoded).logits
            probabilities = torch.softmax(logits, dim=-1)[:, self.entail_index]
            scores.extend(float(p) for p in probabilities.cpu())
        return scores


def load_entailment_backend(config: BackendConfig) -> EntailmentBackend:
    if config.model == "rule:overlap":
        return OverlapEntailmentBackend()
    if config.model.startswith("rule:"):
        raise SidecarError(f"unknown rule backend {config.model!r}")
    return HFEntailmentBackend(config)

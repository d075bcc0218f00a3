"""Named-entity backends for /v1/ner. Spans are byte offsets into the text."""

from __future__ import annotations

import re
from typing import Protocol

from .config import BackendConfig, SidecarError

KINDS = ("Person", "GeopoliticalEntity", "Organization", "Other")

# token-classification tag groups -> stakeholder kinds
_TAG_TO_KIND = {
    "PER": "Person",
    "PERSON": "Person",
    "ORG": "Organization",
    "GPE": "GeopoliticalEntity",
    "LOC": "GeopoliticalEntity",
}

_ORG_TAILS = frozenset(
    {"bank", "court", "nations", "ministry", "commission", "board", "party",
     "authority", "corporation", "university"}
)


class NerBackend(Protocol):
    name: str

    def extract(self, text: str) -> list[dict]: ...


def _byte_offset(text: str, char_index: int) -> int:
    return len(text[:char_index].encode("utf-8"))


class PatternNerBackend:
    """Deterministic capitalized-run matcher for protocol tests and offline use."""

    name = "rule:pattern"

    _RUN = re.compile(r"\b[A-Z][\w]*(?:\s+(?:of\s+)?[A-Z][\w]*)*")

    def extract(self, text):
        entities = []
        for m in self._RUN.finditer(text):
            surface = m.group()
            if " " not in surface and m.start() == 0:
                continue  # bare sentence-initial word carries no signal
            words = [w.lower() for w in surface.split()]
            kind = "Organization" if any(w in _ORG_TAILS for w in words) else "Person"
            entities.append(
                {
                    "surface": surface,
                    "kind": kind,
                    "start": _byte_offset(text, m.start()),
                    "end": _byte_offset(text, m.end()),
                }
            )
        return entities


class HFNerBackend:
    """Transformer token-classification pipeline behind the wire schema."""

    def __init__(self, config: BackendConfig):
        from transformers import pipeline

        self.name = config.ner_model
        self.pipeline = pipeline(
            task="token-classification",
            model=config.ner_model,
            aggregation_strategy="simple",
            device=-1 if config.device == "cpu" else config.device,
        )

    def extract(self, text):
        entities = []
        for hit in self.pipeline(text):
            tag = hit.get("entity_group", hit.get("entity", "")).upper()
            kind = _TAG_TO_KIND.get(tag.split("-")[-1], "Other")
            start, end = int(hit["start"]), int(hit["end"])
            entities.append(
                {
                    "surface": text[start:end],
                    "kind": kind,
                    "start": _byte_offset(text, start),
                    "end": _byte_offset(text, end),
                }
            )
        return entities


def load_ner_backend(config: BackendConfig) -> NerBackend:
    if config.ner_model == "rule:pattern":
        return PatternNerBackend()
    if config.ner_model.startswith("rule:"):
        raise SidecarError(f"unknown rule backend {config.ner_model!r}")
    return HFNerBackend(config)

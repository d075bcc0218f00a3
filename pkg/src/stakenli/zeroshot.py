"""Entailment scorers and argmax / top-K zero-shot classification.

Scorers take (premise, hypothesis) pairs and return entailment probabilities.
The lexical scorer is a deterministic offline baseline; the sidecar scorer
speaks the wire protocol served by the model sidecar. A label never seen in
any compiled artifact is scored the same way as any other, which is what makes
the classifier zero-shot.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from typing import Protocol

import httpx

from .core import EntityDescription, StakeholderLabel
from .entities import RawEntity
from .errors import ProtocolError, TransportError
from .nli import PromptTemplate, render_prompt

# scaffold words contributed by the shipped hypothesis templates
HYPOTHESIS_STOPWORDS = frozenset(
    {"the", "entity", "belongs", "to", "stakeholder", "group", "of", "is", "type"}
)

_TOKEN_RE = re.compile(r"\w+")


class EntailmentScorer(Protocol):
    name: str

    def score_batch(self, pairs: list[tuple[str, str]]) -> list[float]: ...


def _tokens(text: str) -> set[str]:
    return set(_TOKEN_RE.findall(text.lower()))


def lexical_score(premise: str, hypothesis: str) -> float:
    """Fraction of the hypothesis' content tokens present in the premise."""
    content = _tokens(hypothesis) - HYPOTHESIS_STOPWORDS
    if not content:
        return 0.0
    return len(_tokens(premise) & content) / len(content)


class LexicalScorer:
    """Deterministic token-overlap baseline; no model, no network."""

    name = "lexical"

    def score_batch(self, pairs):
        return [lexical_score(premise, hypothesis) for premise, hypothesis in pairs]


class ConstantScorer:
    """Scores every pair identically; useful as a template-invariant control."""

    name = "constant"

    def __init__(self, value: float = 0.5):
        self.value = value

    def score_batch(self, pairs):
        return [self.value] * len(pairs)


def _chunked(items, size):
    for i in range(0, len(items), size):
        yield items[i : i + size]


class SidecarScorer:
    """Client for the sidecar's /v1/entail endpoint with bounded retries."""

    name = "sidecar"

    def __init__(
        self,
        endpoint: str,
        timeout: float = 30.0,
        max_batch: int = 32,
        retries: int = 3,
        backoff: float = 0.2,
        transport=None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.max_batch = max_batch
        self.retries = retries
        self.backoff = backoff
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def _post(self, path: str, payload: dict) -> dict:
        last_error = None
        for attempt in range(self.retries):
            try:
                resp = self._client.post(self.endpoint + path, json=payload)
            except httpx.HTTPError as exc:
                last_error = exc
                time.sleep(self.backoff * (2**attempt))
                continue
            if resp.status_code >= 500:
                last_error = TransportError(f"sidecar returned HTTP {resp.status_code}")
                time.sleep(self.backoff * (2**attempt))
                continue
            if resp.status_code != 200:
                raise ProtocolError(
                    f"sidecar returned HTTP {resp.status_code}: {resp.text[:200]}"
                )
            try:
                return resp.json()
            except ValueError:
                raise ProtocolError("sidecar response is not valid JSON")
        raise TransportError(
            f"sidecar unreachable after {self.retries} attempts: {last_error}"
        )

    def score_batch(self, pairs):
        scores = []
        for chunk in _chunked(list(pairs), self.max_batch):
            payload = {
                "pairs": [{"premise": p, "hypothesis": h} for p, h in chunk]
            }
            data = self._post("/v1/entail", payload)
            chunk_scores = data.get("scores")
            if not isinstance(chunk_scores, list) or len(chunk_scores) != len(chunk):
                raise ProtocolError(
                    f"sidecar returned {len(chunk_scores) if isinstance(chunk_scores, list) else 'no'} "
                    f"scores for {len(chunk)} pairs"
                )
            for value in chunk_scores:
                if not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
                    raise ProtocolError(f"sidecar score {value!r} outside [0, 1]")
                scores.append(float(value))
        return scores

    def health(self) -> dict:
        try:
            resp = self._client.get(self.endpoint + "/v1/health")
        except httpx.HTTPError as exc:
            raise TransportError(f"sidecar health check failed: {exc}")
        if resp.status_code != 200:
            raise TransportError(f"sidecar health returned HTTP {resp.status_code}")
        return resp.json()


def sidecar_score_batch(
    pairs, endpoint: str, timeout: float = 30.0, max_batch: int = 32
) -> list[float]:
    return SidecarScorer(endpoint, timeout=timeout, max_batch=max_batch).score_batch(pairs)


class SidecarRecognizer:
    """Entity recognizer backed by the sidecar's /v1/ner endpoint."""

    name = "sidecar-ner"

    def __init__(self, endpoint: str, timeout: float = 30.0, retries: int = 3, transport=None):
        self._scorer = SidecarScorer(
            endpoint, timeout=timeout, retries=retries, transport=transport
        )

    def recognize(self, text: str) -> list[RawEntity]:
        data = self._scorer._post("/v1/ner", {"text": text})
        entities = data.get("entities")
        if not isinstance(entities, list):
            raise ProtocolError("sidecar NER response missing 'entities' list")
        out = []
        for e in entities:
            try:
                out.append(
                    RawEntity(
                        surface=e["surface"],
                        kind=e["kind"],
                        start=int(e["start"]),
                        end=int(e["end"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ProtocolError(f"malformed NER entity {e!r}: {exc}")
        return out


@dataclass(frozen=True)
class ClassificationResult:
    entity_phrase: str
    scores: dict[str, float]
    predicted: str | tuple[str, ...]
    template_id: str
    backend: str = field(default="", compare=False)


def _score_candidates(description, candidates, template, scorer):
    pairs = [
        (description.rendered, render_prompt(template, description.entity_name, c.name))
        for c in candidates
    ]
    scores = scorer.score_batch(pairs)
    return {c.name: float(s) for c, s in zip(candidates, scores)}


def classify_single(
    description: EntityDescription,
    candidates: list[StakeholderLabel],
    template: PromptTemplate,
    scorer: EntailmentScorer,
) -> ClassificationResult:
    """Argmax classification; ties break in candidate-list (registry) order."""
    if not candidates:
        raise ValueError("candidate list must be non-empty")
    scores = _score_candidates(description, candidates, template, scorer)
    predicted = max(scores, key=scores.__getitem__)  # first max wins ties
    return ClassificationResult(
        entity_phrase=description.entity_name,
        scores=scores,
        predicted=predicted,
        template_id=template.id,
        backend=getattr(scorer, "name", type(scorer).__name__),
    )


def classify_multi(
    description: EntityDescription,
    candidates: list[StakeholderLabel],
    template: PromptTemplate,
    scorer: EntailmentScorer,
    threshold: float,
    k: int,
) -> ClassificationResult:
    """Top-k labels scoring at least threshold, in descending score order."""
    if not candidates:
        raise ValueError("candidate list must be non-empty")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    if k < 1:
        raise ValueError("k must be a positive integer")
    scores = _score_candidates(description, candidates, template, scorer)
    ranked = sorted(scores, key=lambda name: -scores[name])  # stable: ties keep order
    predicted = tuple(name for name in ranked if scores[name] >= threshold)[:k]
    return ClassificationResult(
        entity_phrase=description.entity_name,
        scores=scores,
        predicted=predicted,
        template_id=template.id,
        backend=getattr(scorer, "name", type(scorer).__name__),
    )

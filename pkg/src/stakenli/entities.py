"""From documents to aggregated entity descriptions.

Recognition, kind filtering, within-document coreference, saliency, and
cross-document resolution, with deterministic offline fallback providers.
Neural providers plug in behind the same interfaces (see zeroshot module).
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

from .core import (
    Document,
    EntityDescription,
    EntityMention,
    PipelineConfig,
    Snippet,
    STAKEHOLDER_KINDS,
)
from .errors import InputError, ProviderError
from .similarity import mention_match, normalize_mention

STAKEHOLDER_MENTION_KINDS = ("Person", "GeopoliticalEntity", "Organization")

_TERMINAL_RE = re.compile(r"[.?!]")
# tokens that end with '.' but do not close a sentence
_ABBREVIATIONS = frozenset(
    {"mr", "mrs", "ms", "dr", "prof", "shri", "smt", "rs", "u.s", "u.k", "vs", "st"}
)


@dataclass(frozen=True)
class Sentence:
    index: int
    span: tuple[int, int]  # half-open byte offsets into the document text
    text: str


def _byte_starts(text: str) -> list[int] | None:
    """Byte offset of each char index; None when chars and bytes coincide."""
    if text.isascii():
        return None
    starts = [0]
    for ch in text:
        starts.append(starts[-1] + len(ch.encode("utf-8")))
    return starts


def split_sentences(text: str) -> list[Sentence]:
    """Rule-based splitting on [.?!] followed by whitespace and an uppercase letter.

    A fixed abbreviation stop-list (Mr., Dr., U.S., Rs., ...) suppresses breaks.
    Sentence spans are trimmed to the sentence content; the gaps between spans
    hold only whitespace.
    """
    n = len(text)
    breaks = []  # (end-of-sentence char index, start-of-next char index)
    for m in _TERMINAL_RE.finditer(text):
        end = m.end()
        j = end
        while j < n and text[j].isspace():
            j += 1
        if j == end or j >= n or not text[j].isupper():
            continue
        tail = re.search(r"\S+$", text[:end])
        token = tail.group().lower().rstrip(".?!").lstrip("\"'([")
        if token in _ABBREVIATIONS:
            continue
        breaks.append((end, j))

    regions = []
    start = 0
    for end, nxt in breaks:
        regions.append((start, end))
        start = nxt
    if start < n:
        regions.append((start, n))

    starts = _byte_starts(text)
    sentences = []
    for a, b in regions:
        while a < b and text[a].isspace():
            a += 1
        while b > a and text[b - 1].isspace():
            b -= 1
        if a == b:
            continue
        span = (a, b) if starts is None else (starts[a], starts[b])
        sentences.append(Sentence(index=len(sentences), span=span, text=text[a:b]))
    return sentences


@dataclass(frozen=True)
class RawEntity:
    """Provider output: a surface hit with its kind and byte span."""

    surface: str
    kind: str
    start: int
    end: int


class EntityRecognizer(Protocol):
    name: str

    def recognize(self, text: str) -> list[RawEntity]: ...


class CoreferenceResolver(Protocol):
    name: str

    def resolve(
        self, text: str, mentions: list[EntityMention]
    ) -> list[list[EntityMention]]: ...


class GazetteerRecognizer:
    """Exact-match recognizer over a fixed surface list.

    Longer surfaces win overlaps; matches must sit on word boundaries.
    """

    name = "gazetteer"

    def __init__(self, entries):
        self.entries = []
        for surface, kind in entries:
            if kind not in STAKEHOLDER_KINDS:
                raise InputError(f"gazetteer entry {surface!r} has unknown kind {kind!r}")
            self.entries.append((surface, kind))

    @classmethod
    def from_file(cls, path) -> "GazetteerRecognizer":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise InputError(f"gazetteer file not found: {path}")
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON: {exc.msg}")
        try:
            return cls([(e["surface"], e["kind"]) for e in raw])
        except (KeyError, TypeError):
            raise InputError(f"{path}: expected a list of {{surface, kind}} objects")

    def recognize(self, text: str) -> list[RawEntity]:
        candidates = []
        for surface, kind in self.entries:
            pattern = re.compile(r"(?<!\w)" + re.escape(surface) + r"(?!\w)")
            for m in pattern.finditer(text):
                candidates.append((m.start(), m.end(), surface, kind))
        candidates.sort(key=lambda c: (-(c[1] - c[0]), c[0]))
        taken: list[tuple[int, int]] = []
        hits = []
        for start, end, surface, kind in candidates:
            if any(start < te and ts < end for ts, te in taken):
                continue
            taken.append((start, end))
            hits.append((start, end, surface, kind))
        hits.sort()
        starts = _byte_starts(text)
        out = []
        for start, end, surface, kind in hits:
            if starts is not None:
                start, end = starts[start], starts[end]
            out.append(RawEntity(surface=surface, kind=kind, start=start, end=end))
        return out


@dataclass(frozen=True)
class EntityCluster:
    """All mentions of one entity within one document."""

    doc_id: str
    canonical: str
    mentions: tuple[EntityMention, ...]
    entity_kind: str

    def __post_init__(self):
        if not self.mentions:
            raise ValueError("cluster must contain at least one mention")
        if any(m.doc_id != self.doc_id for m in self.mentions):
            raise ValueError("cluster mentions must share one document")


@dataclass(frozen=True)
class CrossDocEntity:
    canonical: str
    clusters: tuple[EntityCluster, ...]
    entity_kind: str


def _canonical_surface(mentions) -> str:
    """Longest surface; ties broken by earliest document position."""
    ordered = sorted(mentions, key=lambda m: (-len(m.surface), m.char_span[0]))
    return ordered[0].surface


class SimilarityResolver:
    """Fallback coreference: merge mentions whose surfaces match within the document.

    Surfaces are processed in order of first appearance; each attaches to the
    matching cluster whose canonical scores highest under Jaro-Winkler, with
    ties going to the earliest cluster.
    """

    name = "similarity"

    def __init__(self, config: PipelineConfig | None = None):
        self.config = config or PipelineConfig()

    def resolve(self, text, mentions):
        chains = []
        for kind in STAKEHOLDER_KINDS:
            kind_mentions = [m for m in mentions if m.entity_kind == kind]
            if not kind_mentions:
                continue
            by_surface: dict[str, list[EntityMention]] = {}
            for m in kind_mentions:
                by_surface.setdefault(m.surface, []).append(m)
            clusters: list[dict] = []
            for surface, group in by_surface.items():
                best = None
                best_score = -1.0
                for cluster in clusters:
                    decision = mention_match(surface, cluster["canonical"], self.config)
                    if decision.matched and decision.score > best_score:
                        best = cluster
                        best_score = decision.score
                if best is None:
                    clusters.append({"canonical": surface, "mentions": list(group)})
                else:
                    best["mentions"].extend(group)
                    if len(surface) > len(best["canonical"]):
                        best["canonical"] = surface
            chains.extend(c["mentions"] for c in clusters)
        return chains


def recognize_entities(doc: Document, recognizer: EntityRecognizer) -> list[EntityMention]:
    """Run the recognizer and attach sentence indices to each valid mention."""
    sentences = split_sentences(doc.text)
    try:
        raw = recognizer.recognize(doc.text)
    except Exception as exc:
        raise ProviderError(
            f"entity recognizer {recognizer.name!r} failed on document "
            f"{doc.id!r}: {exc}",
            provider=recognizer.name,
        ) from exc
    doc_bytes = doc.text.encode("utf-8")
    mentions = []
    for r in sorted(raw, key=lambda r: (r.start, r.end)):
        if doc_bytes[r.start : r.end].decode("utf-8", errors="replace") != r.surface:
            raise ProviderError(
                f"recognizer {recognizer.name!r} returned span ({r.start}, {r.end}) "
                f"that does not slice to {r.surface!r} in document {doc.id!r}",
                provider=recognizer.name,
            )
        sentence_index = next(
            (s.index for s in sentences if s.span[0] <= r.start < s.span[1]), None
        )
        if sentence_index is None:
            raise ProviderError(
                f"recognizer {recognizer.name!r} returned span outside any sentence "
                f"in document {doc.id!r}",
                provider=recognizer.name,
            )
        mentions.append(
            EntityMention(
                surface=r.surface,
                entity_kind=r.kind,
                doc_id=doc.id,
                char_span=(r.start, r.end),
                sentence_index=sentence_index,
            )
        )
    return mentions


def filter_stakeholder_kinds(mentions: list[EntityMention]) -> list[EntityMention]:
    """Keep Person, GeopoliticalEntity, and Organization mentions, order preserved."""
    return [m for m in mentions if m.entity_kind in STAKEHOLDER_MENTION_KINDS]


def resolve_within_doc(
    doc: Document, mentions: list[EntityMention], resolver: CoreferenceResolver
) -> list[EntityCluster]:
    """Partition a document's mentions into clusters via the resolver."""
    if any(m.doc_id != doc.id for m in mentions):
        raise ValueError("mentions must belong to the given document")
    if not mentions:
        return []
    try:
        chains = resolver.resolve(doc.text, mentions)
    except Exception as exc:
        raise ProviderError(
            f"coreference resolver {resolver.name!r} failed on document "
            f"{doc.id!r}: {exc}",
            provider=resolver.name,
        ) from exc
    flat = [m for chain in chains for m in chain]
    if len(flat) != len(mentions) or {id(m) for m in flat} != {id(m) for m in mentions}:
        raise ProviderError(
            f"resolver {resolver.name!r} did not return a partition of the mentions",
            provider=resolver.name,
        )
    surface_chain: dict[str, int] = {}
    for i, chain in enumerate(chains):
        for m in chain:
            if surface_chain.setdefault(m.surface, i) != i:
                raise ProviderError(
                    f"resolver {resolver.name!r} split identical surface "
                    f"{m.surface!r} across chains",
                    provider=resolver.name,
                )
    clusters = []
    for chain in chains:
        ordered = sorted(chain, key=lambda m: m.char_span)
        canonical = _canonical_surface(ordered)
        kind = next(m.entity_kind for m in ordered if m.surface == canonical)
        clusters.append(
            EntityCluster(
                doc_id=doc.id,
                canonical=canonical,
                mentions=tuple(ordered),
                entity_kind=kind,
            )
        )
    clusters.sort(key=lambda c: c.mentions[0].char_span)
    return clusters


def salient_clusters(clusters, min_mentions: int = 2) -> list[EntityCluster]:
    """Keep clusters mentioned at least min_mentions times."""
    return [c for c in clusters if len(c.mentions) >= min_mentions]


def wd_context(doc: Document, cluster: EntityCluster) -> list[tuple[int, str]]:
    """Deduplicated sentences containing any cluster mention, in document order."""
    if cluster.doc_id != doc.id:
        raise ValueError("cluster does not belong to the given document")
    sentences = split_sentences(doc.text)
    wanted = sorted({m.sentence_index for m in cluster.mentions})
    return [(i, sentences[i].text) for i in wanted]


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def resolve_cross_doc(
    all_clusters: list[EntityCluster], config: PipelineConfig | None = None
) -> list[CrossDocEntity]:
    """Union clusters of the same kind whose canonicals match, transitively."""
    if config is None:
        config = PipelineConfig()
    n = len(all_clusters)
    uf = _UnionFind(n)
    normalized = [normalize_mention(c.canonical) for c in all_clusters]
    for i in range(n):
        for j in range(i + 1, n):
            if all_clusters[i].entity_kind != all_clusters[j].entity_kind:
                continue
            if uf.find(i) == uf.find(j):
                continue
            if mention_match(normalized[i], normalized[j], config).matched:
                uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(uf.find(i), []).append(i)
    entities = []
    for root in sorted(groups, key=lambda r: min(groups[r])):
        members = [all_clusters[i] for i in sorted(groups[root])]
        canonical = max(members, key=lambda c: len(c.canonical)).canonical
        entities.append(
            CrossDocEntity(
                canonical=canonical,
                clusters=tuple(members),
                entity_kind=members[0].entity_kind,
            )
        )
    return entities


@dataclass(frozen=True)
class ContextSnippet:
    doc_id: str
    sentence_index: int
    text: str
    date: str | None = None


def build_description(
    entity: CrossDocEntity,
    contexts: list[ContextSnippet],
    background: str | None,
    config: PipelineConfig | None = None,
) -> EntityDescription:
    """Assemble background + chronological snippets within the premise budget.

    Snippets are cut at the last whole sentence that fits; at least one snippet
    survives even when the background has to be truncated or dropped to make room.
    """
    if config is None:
        config = PipelineConfig()
    ordered = sorted(
        contexts, key=lambda c: (c.date or "", c.doc_id, c.sentence_index)
    )
    seen = set()
    snippets = []
    for c in ordered:
        key = (c.doc_id, c.sentence_index)
        if key in seen or not c.text:
            continue
        seen.add(key)
        snippets.append(c)
    if not snippets:
        raise ValueError(f"no context sentences for entity {entity.canonical!r}")

    budget = config.max_premise_chars
    first = snippets[0]
    kept_background = None
    if background:
        bg_sentences = split_sentences(background)
        kept = []
        length = 0
        for s in bg_sentences:
            extra = len(s.text) + (1 if kept else 0)
            if length + extra + 1 + len(first.text) > budget:
                break
            kept.append(s.text)
            length += extra
        if len(kept) == len(bg_sentences):
            kept_background = background
        elif kept:
            kept_background = " ".join(kept)

    taken = [first]
    rendered_len = (len(kept_background) + 1 if kept_background else 0) + len(first.text)
    for c in snippets[1:]:
        if rendered_len + 1 + len(c.text) > budget:
            break
        taken.append(c)
        rendered_len += 1 + len(c.text)

    return EntityDescription(
        entity_name=entity.canonical,
        snippets=tuple(Snippet(c.doc_id, c.sentence_index, c.text) for c in taken),
        background=kept_background,
    )


@dataclass(frozen=True)
class DescribedEntity:
    """One pipeline output row: a cross-document entity with its description."""

    canonical: str
    entity_kind: str
    topic: str
    doc_ids: tuple[str, ...]
    description: EntityDescription


def describe_corpus(
    corpus,
    recognizer: EntityRecognizer,
    resolver: CoreferenceResolver,
    config: PipelineConfig | None = None,
    background_lookup: Callable[[str], str | None] | None = None,
    jobs: int = 1,
) -> list[DescribedEntity]:
    """Run the full pipeline over a corpus and emit one row per entity."""
    if config is None:
        config = PipelineConfig()
    docs = list(corpus)
    docs_by_id = {d.id: d for d in docs}

    def per_doc(doc):
        mentions = filter_stakeholder_kinds(recognize_entities(doc, recognizer))
        clusters = resolve_within_doc(doc, mentions, resolver)
        clusters = salient_clusters(clusters, config.saliency_min_mentions)
        return [(cluster, wd_context(doc, cluster)) for cluster in clusters]

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_doc_results = list(pool.map(per_doc, docs))
    else:
        per_doc_results = [per_doc(d) for d in docs]

    all_clusters = []
    contexts_of: dict[EntityCluster, list[tuple[int, str]]] = {}
    for result in per_doc_results:
        for cluster, context in result:
            all_clusters.append(cluster)
            contexts_of[cluster] = context

    out = []
    for entity in resolve_cross_doc(all_clusters, config):
        contexts = [
            ContextSnippet(
                doc_id=cluster.doc_id,
                sentence_index=idx,
                text=text,
                date=docs_by_id[cluster.doc_id].date,
            )
            for cluster in entity.clusters
            for idx, text in contexts_of[cluster]
        ]
        background = background_lookup(entity.canonical) if background_lookup else None
        description = build_description(entity, contexts, background, config)
        doc_ids = []
        for cluster in entity.clusters:
            if cluster.doc_id not in doc_ids:
                doc_ids.append(cluster.doc_id)
        out.append(
            DescribedEntity(
                canonical=entity.canonical,
                entity_kind=entity.entity_kind,
                topic=docs_by_id[entity.clusters[0].doc_id].topic,
                doc_ids=tuple(doc_ids),
                description=description,
            )
        )
    return out

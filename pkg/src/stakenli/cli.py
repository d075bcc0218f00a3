"""Command-line surface: ingest -> describe -> compile -> classify -> eval.

Every stage reads and writes plain files so any step can be re-run or swapped.
Exit codes: 0 success, 2 input error, 3 provider error, 4 backend transport error.
"""

from __future__ import annotations

import csv
import datetime
import functools
import hashlib
import json
import os
import sys
from pathlib import Path

import click

from . import __version__
from .core import (
    EntityDescription,
    PipelineConfig,
    Snippet,
    default_registry_path,
    load_label_registry,
)
from .entities import GazetteerRecognizer, SimilarityResolver, describe_corpus
from .errors import InputError, ProviderError, TransportError
from .evaluate import robustness_sweep, score_predictions
from .ingest import LabeledExample, filter_by_topic, load_corpus, write_corpus
from .knowledge import (
    CACHE_DIR_ENV,
    DEFAULT_BASE_URL,
    EncyclopediaClient,
    KnowledgeCache,
    intro_sentences,
    load_overrides,
    lookup_page,
)
from .nli import compile_dataset, load_templates, write_nli
from .zeroshot import (
    LexicalScorer,
    SidecarRecognizer,
    SidecarScorer,
    classify_multi,
    classify_single,
)

EXIT_INPUT = 2
EXIT_PROVIDER = 3
EXIT_TRANSPORT = 4


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InputError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except TransportError as exc:
            click.echo(f"backend error: {exc}", err=True)
            sys.exit(EXIT_TRANSPORT)
        except ProviderError as exc:
            click.echo(f"provider error: {exc}", err=True)
            sys.exit(EXIT_PROVIDER)

    return wrapper


def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(out, command, inputs, config=None, seed=None, extra=None):
    now = datetime.datetime.now(datetime.timezone.utc).isoformat()
    manifest = {
        "tool": "stakenli",
        "version": __version__,
        "command": command,
        "config": config.to_dict() if config is not None else None,
        "seed": seed,
        "inputs": {str(p): _sha256(p) for p in inputs if Path(p).exists()},
        "outputs": {str(out): _sha256(out)},
        "generated_at": now,
    }
    if extra:
        manifest.update(extra)
    Path(f"{out}.manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def _load_config(config_path, **overrides) -> PipelineConfig:
    values = {}
    if config_path:
        try:
            values = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise InputError(f"config file not found: {config_path}")
        except json.JSONDecodeError as exc:
            raise InputError(f"{config_path}: invalid JSON: {exc.msg}")
    values.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig.from_dict(values)


def _jsonl_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n"


def _read_jsonl(path: Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InputError(f"file not found: {path}")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            yield lineno, json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: malformed JSON on line {lineno}: {exc.msg}")


def _description_from_json(record, where) -> EntityDescription:
    desc = record.get("description")
    if not isinstance(desc, dict) or not desc.get("snippets"):
        raise InputError(f"{where}: missing description with snippets")
    return EntityDescription(
        entity_name=record["entity_phrase"],
        snippets=tuple(
            Snippet(s["doc_id"], int(s["sentence_index"]), s["text"])
            for s in desc["snippets"]
        ),
        background=desc.get("background"),
    )


@click.group()
@click.version_option(version=__version__, prog_name="stakenli")
def main():
    """Stakeholder typing for news entities via textual entailment."""


@main.command("ingest")
@click.argument("corpus_path", type=click.Path())
@click.option("--keywords", help="Comma-separated topic keywords.")
@click.option("--keywords-file", type=click.Path(), help="One keyword per line.")
@click.option("--min-hits", type=int, default=1, show_default=True)
@click.option("-o", "--out", required=True, type=click.Path())
@_handle_errors
def cmd_ingest(corpus_path, keywords, keywords_file, min_hits, out):
    """Filter a corpus file down to documents matching topic keywords."""
    corpus = load_corpus(corpus_path)
    words = []
    if keywords:
        words.extend(w.strip() for w in keywords.split(",") if w.strip())
    if keywords_file:
        try:
            lines = Path(keywords_file).read_text(encoding="utf-8").splitlines()
        except FileNotFoundError:
            raise InputError(f"keywords file not found: {keywords_file}")
        words.extend(w.strip() for w in lines if w.strip())
    if not words:
        raise InputError("no keywords given; use --keywords or --keywords-file")
    filtered = filter_by_topic(corpus, words, min_hits)
    write_corpus(filtered, out)
    _write_manifest(out, "ingest", [corpus_path] + ([keywords_file] if keywords_file else []))
    if not len(filtered):
        click.echo("warning: no documents matched the keywords", err=True)
    click.echo(f"kept {len(filtered)} of {len(corpus)} documents -> {out}")


@main.command("describe")
@click.argument("corpus_path", type=click.Path())
@click.option("--provider", type=click.Choice(["builtin", "sidecar"]), default="builtin",
              show_default=True)
@click.option("--gazetteer", type=click.Path(), help="Surface list for the builtin recognizer.")
@click.option("--endpoint", help="Sidecar base URL (provider=sidecar).")
@click.option("--overrides", "overrides_path", type=click.Path(),
              help="JSON map of phrase -> encyclopedia page title.")
@click.option("--cache-dir", type=click.Path(),
              help=f"Knowledge cache directory (default ${CACHE_DIR_ENV}).")
@click.option("--online/--offline", default=False,
              help="Allow encyclopedia lookups over the network.")
@click.option("--base-url", default=DEFAULT_BASE_URL, show_default=True)
@click.option("--config", "config_path", type=click.Path(),
              help="JSON file overriding pipeline config defaults.")
@click.option("--min-mentions", type=int, help="Saliency threshold override.")
@click.option("--jobs", type=int, default=None, help="Per-document parallelism.")
@click.option("-o", "--out", required=True, type=click.Path())
@_handle_errors
def cmd_describe(corpus_path, provider, gazetteer, endpoint, overrides_path, cache_dir,
                 online, base_url, config_path, min_mentions, jobs, out):
    """Build aggregated entity descriptions from a corpus."""
    config = _load_config(config_path, saliency_min_mentions=min_mentions)
    corpus = load_corpus(corpus_path)

    if provider == "sidecar":
        if not endpoint:
            raise InputError("--provider sidecar requires --endpoint")
        recognizer = SidecarRecognizer(endpoint)
    else:
        if not gazetteer:
            raise InputError("--provider builtin requires --gazetteer")
        recognizer = GazetteerRecognizer.from_file(gazetteer)
    resolver = SimilarityResolver(config)

    background_lookup = None
    if cache_dir or os.environ.get(CACHE_DIR_ENV):
        cache = KnowledgeCache(cache_dir)
        overrides = load_overrides(overrides_path) if overrides_path else {}
        client = EncyclopediaClient(base_url) if online else None

        def background_lookup(phrase):
            page = lookup_page(phrase, cache, overrides, online=online, client=client)
            if page is None:
                return None
            return intro_sentences(page, config.background_sentences)

    described = describe_corpus(
        corpus,
        recognizer,
        resolver,
        config,
        background_lookup=background_lookup,
        jobs=jobs or os.cpu_count() or 1,
    )
    with Path(out).open("w", encoding="utf-8") as fh:
        for row in described:
            desc = {
                "snippets": [
                    {"doc_id": s.doc_id, "sentence_index": s.sentence_index, "text": s.text}
                    for s in row.description.snippets
                ],
                "rendered": row.description.rendered,
            }
            if row.description.background is not None:
                desc["background"] = row.description.background
            fh.write(
                _jsonl_line(
                    {
                        "entity_phrase": row.canonical,
                        "entity_kind": row.entity_kind,
                        "topic": row.topic,
                        "doc_ids": list(row.doc_ids),
                        "description": desc,
                    }
                )
            )
    inputs = [corpus_path]
    if gazetteer:
        inputs.append(gazetteer)
    if overrides_path:
        inputs.append(overrides_path)
    _write_manifest(out, "describe", inputs, config=config)
    click.echo(f"described {len(described)} entities -> {out}")


@main.command("compile")
@click.argument("labeled_path", type=click.Path())
@click.option("--registry", "registry_path", type=click.Path(),
              default=str(default_registry_path()), show_default=False,
              help="Label registry JSON (default: shipped Table registry).")
@click.option("--template", "template_id", default="original", show_default=True)
@click.option("--templates-file", type=click.Path(), help="Template registry JSON.")
@click.option("-o", "--out", required=True, type=click.Path())
@_handle_errors
def cmd_compile(labeled_path, registry_path, template_id, templates_file, out):
    """Compile a labeled dataset into premise/hypothesis NLI instances."""
    from .ingest import load_labeled

    registry = load_label_registry(registry_path)
    templates = load_templates(templates_file)
    if template_id not in templates:
        raise InputError(
            f"unknown template {template_id!r}; available: {', '.join(templates)}"
        )
    examples = load_labeled(labeled_path, registry)
    instances = compile_dataset(examples, registry, templates[template_id])
    write_nli(instances, out)
    _write_manifest(out, "compile", [labeled_path, registry_path])
    positives = sum(i.label for i in instances)
    click.echo(f"compiled {len(instances)} instances ({positives} positive) -> {out}")


def _load_descriptions(path):
    rows = []
    for lineno, record in _read_jsonl(path):
        where = f"{path}: line {lineno}"
        try:
            rows.append(
                {
                    "entity_phrase": record["entity_phrase"],
                    "topic": record["topic"],
                    "description": _description_from_json(record, where),
                }
            )
        except KeyError as exc:
            raise InputError(f"{where}: missing field {exc}")
    return rows


@main.command("classify")
@click.argument("descriptions_path", type=click.Path())
@click.option("--registry", "registry_path", type=click.Path(),
              default=str(default_registry_path()), show_default=False)
@click.option("--template", "template_id", default="original", show_default=True)
@click.option("--templates-file", type=click.Path())
@click.option("--backend", type=click.Choice(["lexical", "sidecar"]), default="lexical",
              show_default=True)
@click.option("--endpoint", help="Sidecar base URL (backend=sidecar).")
@click.option("--threshold", type=float, help="Multi-label score floor.")
@click.option("--top-k", type=int, help="Multi-label prediction cap.")
@click.option("-o", "--out", required=True, type=click.Path())
@_handle_errors
def cmd_classify(descriptions_path, registry_path, template_id, templates_file,
                 backend, endpoint, threshold, top_k, out):
    """Score candidate stakeholder labels for each described entity."""
    registry = load_label_registry(registry_path)
    templates = load_templates(templates_file)
    if template_id not in templates:
        raise InputError(
            f"unknown template {template_id!r}; available: {', '.join(templates)}"
        )
    template = templates[template_id]
    if backend == "sidecar":
        if not endpoint:
            raise InputError("--backend sidecar requires --endpoint")
        scorer = SidecarScorer(endpoint)
    else:
        scorer = LexicalScorer()
    multi = threshold is not None or top_k is not None

    rows = _load_descriptions(descriptions_path)
    with Path(out).open("w", encoding="utf-8") as fh:
        for row in rows:
            candidates = registry.candidates_for_topic(row["topic"])
            if multi:
                result = classify_multi(
                    row["description"], candidates, template, scorer,
                    threshold=threshold if threshold is not None else 0.0,
                    k=top_k if top_k is not None else len(candidates),
                )
                predicted = list(result.predicted)
            else:
                result = classify_single(row["description"], candidates, template, scorer)
                predicted = result.predicted
            fh.write(
                _jsonl_line(
                    {
                        "entity_phrase": row["entity_phrase"],
                        "topic": row["topic"],
                        "predicted": predicted,
                        "scores": result.scores,
                        "template_id": result.template_id,
                        "backend": result.backend,
                    }
                )
            )
    _write_manifest(out, "classify", [descriptions_path, registry_path])
    click.echo(f"classified {len(rows)} entities -> {out}")


def _load_gold_labels(path):
    golds = {}
    for lineno, record in _read_jsonl(path):
        try:
            key = (record["entity_phrase"], record["topic"])
            golds[key] = record["label"]
        except KeyError as exc:
            raise InputError(f"{path}: line {lineno}: missing field {exc}")
    return golds


@main.command("eval")
@click.argument("predictions_path", type=click.Path())
@click.argument("golds_path", type=click.Path())
@click.option("--split-name", default="test", show_default=True)
@click.option("--csv", "csv_path", type=click.Path(), help="Also emit per-label CSV rows.")
@click.option("-o", "--out", required=True, type=click.Path())
@_handle_errors
def cmd_eval(predictions_path, golds_path, split_name, csv_path, out):
    """Score a predictions file against gold labels (macro P/R/F1)."""
    golds_by_key = _load_gold_labels(golds_path)
    golds, preds = [], []
    template_id = backend = ""
    for lineno, record in _read_jsonl(predictions_path):
        try:
            key = (record["entity_phrase"], record["topic"])
            predicted = record["predicted"]
        except KeyError as exc:
            raise InputError(f"{predictions_path}: line {lineno}: missing field {exc}")
        if key not in golds_by_key:
            raise InputError(
                f"{predictions_path}: line {lineno}: no gold label for entity "
                f"{key[0]!r} in topic {key[1]!r}"
            )
        if isinstance(predicted, list):
            if not predicted:
                raise InputError(
                    f"{predictions_path}: line {lineno}: empty multi-label prediction "
                    "cannot be scored single-label"
                )
            predicted = predicted[0]
        golds.append(golds_by_key[key])
        preds.append(predicted)
        template_id = record.get("template_id", template_id)
        backend = record.get("backend", backend)
    if not golds:
        raise InputError(f"{predictions_path}: no predictions to score")
    universe = []
    for g in golds:
        if g not in universe:
            universe.append(g)
    report = score_predictions(
        golds, preds, universe, split=split_name, template_id=template_id, backend=backend
    )
    Path(out).write_text(report.to_json() + "\n", encoding="utf-8")
    if csv_path:
        with Path(csv_path).open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["split", "template", "label", "precision", "recall", "f1"])
            for name, m in report.per_label.items():
                writer.writerow([split_name, template_id, name, m.precision, m.recall, m.f1])
    _write_manifest(out, "eval", [predictions_path, golds_path])
    click.echo(
        f"{split_name}: macro P={report.macro_precision:.4f} "
        f"R={report.macro_recall:.4f} F1={report.macro_f1:.4f} -> {out}"
    )


@main.command("robustness")
@click.argument("descriptions_path", type=click.Path())
@click.argument("golds_path", type=click.Path())
@click.option("--registry", "registry_path", type=click.Path(),
              default=str(default_registry_path()), show_default=False)
@click.option("--templates", "template_ids", default="original,template1,template2",
              show_default=True, help="Comma-separated template ids to sweep.")
@click.option("--templates-file", type=click.Path())
@click.option("--backend", type=click.Choice(["lexical", "sidecar"]), default="lexical",
              show_default=True)
@click.option("--endpoint")
@click.option("--split-name", default="test", show_default=True)
@click.option("-o", "--out", required=True, type=click.Path())
@_handle_errors
def cmd_robustness(descriptions_path, golds_path, registry_path, template_ids,
                   templates_file, backend, endpoint, split_name, out):
    """Evaluate the same split under several hypothesis templates."""
    registry = load_label_registry(registry_path)
    templates = load_templates(templates_file)
    ids = [t.strip() for t in template_ids.split(",") if t.strip()]
    missing = [t for t in ids if t not in templates]
    if missing:
        raise InputError(f"unknown templates: {', '.join(missing)}")
    if backend == "sidecar":
        if not endpoint:
            raise InputError("--backend sidecar requires --endpoint")
        scorer = SidecarScorer(endpoint)
    else:
        scorer = LexicalScorer()

    golds_by_key = _load_gold_labels(golds_path)
    examples = []
    for row in _load_descriptions(descriptions_path):
        key = (row["entity_phrase"], row["topic"])
        if key not in golds_by_key:
            raise InputError(
                f"no gold label for entity {key[0]!r} in topic {key[1]!r}"
            )
        examples.append(
            LabeledExample(
                entity_phrase=row["entity_phrase"],
                description=row["description"],
                label=golds_by_key[key],
                topic=row["topic"],
            )
        )
    report = robustness_sweep(
        examples, registry, [templates[t] for t in ids], scorer, split=split_name
    )
    Path(out).write_text(report.to_json() + "\n", encoding="utf-8")
    _write_manifest(out, "robustness", [descriptions_path, golds_path, registry_path])
    click.echo(
        f"swept {len(ids)} templates: max macro-F1 spread {report.max_spread:.4f} -> {out}"
    )


if __name__ == "__main__":
    main()

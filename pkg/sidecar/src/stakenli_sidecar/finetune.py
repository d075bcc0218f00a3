"""Fine-tune a sequence-pair classifier on a compiled NLI dataset.

The dataset is the line-delimited JSON format emitted by the pipeline's
compile step: {"premise", "hypothesis", "label": 0|1, ...}. Checkpoints are
standard transformers directories, loadable by the serving backend.

``--model tiny:fresh`` builds a small randomly initialized transformer with a
vocabulary taken from the dataset itself; it trains in seconds on CPU and
exists for pipeline validation, not model quality.
"""

from __future__ import annotations

import json
import re
import warnings
from pathlib import Path

from .config import BackendConfig, SidecarError

_WORD_RE = re.compile(r"\w+|[^\w\s]")

ID2LABEL = {0: "not_entailment", 1: "entailment"}


def load_nli_dataset(path) -> list[tuple[str, str, int]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise SidecarError(f"dataset not found: {path}")
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            rows.append(
                (record["premise"], record["hypothesis"], int(record["label"]))
            )
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise SidecarError(f"{path}: bad NLI record on line {lineno}: {exc}")
    return rows


def _build_tiny(rows, config, seed):
    import torch
    from transformers import BertConfig, BertForSequenceClassification, BertTokenizerFast

    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    seen = set(vocab)
    for premise, hypothesis, _ in rows:
        for token in _WORD_RE.findall(f"{premise} {hypothesis}".lower()):
            if token not in seen:
                seen.add(token)
                vocab.append(token)
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False) as fh:
        fh.write("\n".join(vocab))
        vocab_file = fh.name
    tokenizer = BertTokenizerFast(vocab_file=vocab_file, do_lower_case=True)
    torch.manual_seed(seed)
    model_config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=64,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=128,
        max_position_embeddings=max(config.max_seq_length, 64),
        num_labels=2,
        id2label=ID2LABEL,
        label2id={v: k for k, v in ID2LABEL.items()},
    )
    return tokenizer, BertForSequenceClassification(model_config)


def _load_pretrained(model_id, config):
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(model_id)
    model = AutoModelForSequenceClassification.from_pretrained(
        model_id,
        num_labels=2,
        id2label=ID2LABEL,
        label2id={v: k for k, v in ID2LABEL.items()},
        ignore_mismatched_sizes=True,
    )
    return tokenizer, model


def _epoch_loss(model, tokenizer, rows, config, torch, optimizer=None):
    total = 0.0
    batches = 0
    for start in range(0, len(rows), config.batch_size):
        batch = rows[start : start + config.batch_size]
        encoded = tokenizer(
            [p for p, _, _ in batch],
            [h for _, h, _ in batch],
            truncation=True,
            max_length=config.max_seq_length,
            padding=True,
            return_tensors="pt",
        ).to(config.device)
        labels = torch.tensor([label for _, _, label in batch], device=config.device)
        if optimizer is None:
            with torch.no_grad():
                loss = model(**encoded, labels=labels).loss
        else:
            optimizer.zero_grad()
            loss = model(**encoded, labels=labels).loss
            loss.backward()
            optimizer.step()
        total += float(loss.detach())
        batches += 1
    return total / batches


def finetune(
    dataset_path,
    config: BackendConfig,
    out_dir,
    epochs: int = 1,
    learning_rate: float = 3e-3,
    resume_from=None,
    seed: int = 0,
) -> dict:
    """Train and save a checkpoint; returns the training log."""
    import torch

    config.reject_p_tuning()
    rows = load_nli_dataset(dataset_path)
    if not rows:
        raise SidecarError(f"dataset {dataset_path} is empty")
    labels = {label for _, _, label in rows}
    if labels == {1}:
        warnings.warn("dataset has no negative instances; nothing to contrast")
    elif labels == {0}:
        warnings.warn("dataset has no positive instances; nothing to entail")

    if resume_from is not None:
        tokenizer, model = _load_pretrained(str(resume_from), config)
    elif config.model.startswith("tiny:"):
        tokenizer, model = _build_tiny(rows, config, seed)
    else:
        tokenizer, model = _load_pretrained(config.model, config)
    model.to(config.device)

    torch.manual_seed(seed)
    model.eval()
    initial_loss = _epoch_loss(model, tokenizer, rows, config, torch)
    optimizer = torch.optim.AdamW(model.parameters(), lr=learning_rate)
    log = {"model": config.model, "epochs": epochs, "learning_rate": learning_rate,
           "seed": seed, "n_instances": len(rows), "initial_loss": initial_loss,
           "loss_per_epoch": []}
    model.train()
    for epoch in range(epochs):
        loss = _epoch_loss(model, tokenizer, rows, config, torch, optimizer)
        log["loss_per_epoch"].append({"epoch": epoch + 1, "loss": loss})
    model.eval()
    log["final_loss"] = _epoch_loss(model, tokenizer, rows, config, torch)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    (out_dir / "training_log.json").write_text(
        json.dumps(log, indent=2) + "\n", encoding="utf-8"
    )
    return log

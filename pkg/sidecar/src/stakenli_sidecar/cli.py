"""Sidecar command line: serve the HTTP endpoints or fine-tune a checkpoint."""

from __future__ import annotations

import sys

import click

from .config import BackendConfig, SidecarError


def _config_from(config_file, **overrides) -> BackendConfig:
    config = BackendConfig.from_file(config_file) if config_file else BackendConfig()
    for key, value in overrides.items():
        if value is not None:
            setattr(config, key, value)
    if config.max_seq_length < 16 or config.batch_size < 1:
        raise SidecarError("invalid config after overrides")
    return config


@click.group()
def main():
    """Neural NER and NLI entailment scoring over the stakenli wire protocol."""


@main.command("serve")
@click.option("--model", help="Entailment model id, checkpoint path, or rule:overlap.")
@click.option("--ner-model", help="NER model id or rule:pattern.")
@click.option("--config", "config_file", type=click.Path(), help="BackendConfig JSON.")
@click.option("--device")
@click.option("--max-seq-length", type=int)
@click.option("--batch-size", type=int)
@click.option("--p-tuning", "p_tuning_enabled", is_flag=True, default=None,
              help="Reserved; rejected with an explanation.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8301, show_default=True, type=int)
def cmd_serve(model, ner_model, config_file, device, max_seq_length, batch_size,
              p_tuning_enabled, host, port):
    """Load the backends and serve /v1/health, /v1/entail, /v1/ner."""
    import uvicorn

    from .backends import load_entailment_backend
    from .ner import load_ner_backend
    from .service import create_app

    try:
        config = _config_from(
            config_file, model=model, ner_model=ner_model, device=device,
            max_seq_length=max_seq_length, batch_size=batch_size,
            p_tuning_enabled=p_tuning_enabled,
        )
        config.reject_p_tuning()
        entail_backend = load_entailment_backend(config)
        ner_backend = load_ner_backend(config)
    except SidecarError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except Exception as exc:  # model load failures from transformers/torch
        click.echo(f"error: could not load model: {exc}", err=True)
        sys.exit(1)
    app = create_app(entail_backend, ner_backend, model_name=config.model)
    click.echo(f"serving {config.model} on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command("finetune")
@click.argument("dataset", type=click.Path())
@click.option("--model", default="tiny:fresh", show_default=True,
              help="Base model id, or tiny:fresh for a small random-init model.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--config", "config_file", type=click.Path())
@click.option("--epochs", default=1, show_default=True, type=int)
@click.option("--learning-rate", default=3e-3, show_default=True, type=float)
@click.option("--batch-size", type=int)
@click.option("--max-seq-length", type=int)
@click.option("--resume-from", type=click.Path(), help="Continue from a checkpoint dir.")
@click.option("--seed", default=0, show_default=True, type=int)
def cmd_finetune(dataset, model, out_dir, config_file, epochs, learning_rate,
                 batch_size, max_seq_length, resume_from, seed):
    """Binary entailment fine-tuning on a compiled NLI dataset."""
    from .finetune import finetune

    try:
        config = _config_from(
            config_file, model=model, batch_size=batch_size,
            max_seq_length=max_seq_length,
        )
        log = finetune(
            dataset, config, out_dir, epochs=epochs, learning_rate=learning_rate,
            resume_from=resume_from, seed=seed,
        )
    except SidecarError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(
        f"trained {log['epochs']} epoch(s) on {log['n_instances']} instances: "
        f"loss {log['initial_loss']:.4f} -> {log['final_loss']:.4f}; "
        f"checkpoint in {out_dir}"
    )


if __name__ == "__main__":
    main()

"""Backend configuration shared by serving and fine-tuning."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path


class SidecarError(Exception):
    pass


@dataclass
class BackendConfig:
    model: str = "rule:overlap"
    ner_model: str = "rule:pattern"
    device: str = "cpu"
    max_seq_length: int = 256
    batch_size: int = 8
    p_tuning_enabled: bool = False

    def __post_init__(self):
        if self.max_seq_length < 16:
            raise SidecarError("max_seq_length must be at least 16")
        if self.batch_size < 1:
            raise SidecarError("batch_size must be at least 1")

    def reject_p_tuning(self):
        # reserved flag: continuous prompt embeddings are not implemented
        if self.p_tuning_enabled:
            raise SidecarError(
                "p_tuning_enabled is reserved and not implemented; "
                "run with discrete prompts only"
            )

    @classmethod
    def from_file(cls, path) -> "BackendConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise SidecarError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise SidecarError(f"{path}: invalid JSON: {exc.msg}")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise SidecarError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**raw)

"""Pipeline configuration shared by the CLI subcommands."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional, Union


class ConfigError(Exception):
    pass


@dataclass
class PipelineConfig:
    """Paths, seeds, and knobs for the end-to-end pipeline.

    Unknown keys in a config file are rejected; command-line flags override
    file values.
    """

    dump_path: str = ""
    rules_path: str = ""
    archive_path: str = ""
    models_dir: str = "models"
    reports_dir: str = "reports"
    seeds: list[int] = field(default_factory=lambda: [0])
    variants: list[str] = field(default_factory=lambda: ["comment"])
    classify_threshold: float = 0.5
    flag_threshold: float = 0.5
    split_seed: int = 0
    encoder_checkpoint: str = "tiny"
    epochs: int = 10
    learning_rate: float = 1e-5
    batch_size: Optional[int] = None
    patience: int = 5
    context_hidden: int = 768
    context_layers: int = 2
    context_cell: str = "gru"

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "PipelineConfig":
        record = json.loads(Path(path).read_text())
        known = {f.name for f in fields(cls)}
        unknown = set(record) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**record)

    def to_record(self) -> dict:
        return asdict(self)


def write_manifest(out_dir: Union[str, Path], command: str, params: dict, outputs: list[str]) -> Path:
    """Record what a stage ran with, for exact reruns.

    No timestamps, and output paths are stored relative to the manifest's
    directory where possible, so identical runs yield identical bytes.
    """
    out_dir = Path(out_dir).resolve()
    out_dir.mkdir(parents=True, exist_ok=True)

    def relativize(path: str) -> str:
        try:
            return str(Path(path).resolve().relative_to(out_dir))
        except ValueError:
            return path

    manifest = {
        "command": command,
        "params": params,
        "outputs": sorted(relativize(p) for p in outputs),
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return path

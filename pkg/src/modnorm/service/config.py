"""Service settings: file-based with documented environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Mapping, Optional, Union

ENV_PREFIX = "MODNORM_"


class ConfigError(Exception):
    pass


@dataclass
class ServiceSettings:
    """Runtime configuration for the triage service.

    Every field can be overridden by an environment variable named
    ``MODNORM_<FIELD>`` (upper-cased), e.g. ``MODNORM_AUTH_TOKEN``.
    """

    rules_path: str = ""
    explainer_dir: str = ""
    detector_dirs: dict[str, str] = field(default_factory=dict)
    flag_threshold: float = 0.5
    community_thresholds: dict[str, float] = field(default_factory=dict)
    decision_log: str = "decisions.jsonl"
    export_path: str = ""  # defaults to decision_log + ".labeled.jsonl"
    listen: str = "127.0.0.1:8080"
    auth_token: str = ""
    static_dir: str = ""

    def __post_init__(self) -> None:
        if not self.export_path:
            self.export_path = self.decision_log + ".labeled.jsonl"

    def threshold_for(self, subreddit: str) -> float:
        return self.community_thresholds.get(subreddit, self.flag_threshold)

    @classmethod
    def from_file(
        cls,
        path: Optional[Union[str, Path]] = None,
        env: Optional[Mapping[str, str]] = None,
    ) -> "ServiceSettings":
        record: dict = {}
        if path is not None:
            record = json.loads(Path(path).read_text())
        known = {f.name for f in fields(cls)}
        unknown = set(record) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")

        env = env if env is not None else os.environ
        for name in known:
            env_key = ENV_PREFIX + name.upper()
            if env_key in env:
                raw = env[env_key]
                if name in ("detector_dirs", "community_thresholds"):
                    record[name] = json.loads(raw)
                elif name == "flag_threshold":
                    record[name] = float(raw)
                else:
                    record[name] = raw
        return cls(**record)

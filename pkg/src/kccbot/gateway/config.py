"""Service configuration: JSON file with environment-variable overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

ENV_PREFIX = "KCCBOT_"

_ENV_KEYS = {
    "corpus_path": "CORPUS",
    "index_path": "INDEX",
    "policy_path": "POLICY",
    "port": "PORT",
    "idle_limit_seconds": "IDLE_LIMIT",
    "session_store_path": "SESSION_STORE",
    "webchat_dir": "WEBCHAT_DIR",
}


@dataclass
class ServiceConfig:
    corpus_path: str | None = None
    index_path: str | None = None
    policy_path: str | None = None
    port: int = 8080
    idle_limit_seconds: float = float("inf")
    session_store_path: str | None = None
    webchat_dir: str | None = None


def load_config(path=None, env: dict[str, str] | None = None) -> ServiceConfig:
    """Read config from a JSON file, then let KCCBOT_* env vars override it."""
    if env is None:
        env = dict(os.environ)
    values: dict[str, object] = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        for key in ServiceConfig.__dataclass_fields__:
            if key in raw:
                values[key] = raw[key]
    for key, suffix in _ENV_KEYS.items():
        raw_value = env.get(ENV_PREFIX + suffix)
        if raw_value is not None:
            values[key] = raw_value
    if "port" in values:
        values["port"] = int(values["port"])
    if "idle_limit_seconds" in values:
        values["idle_limit_seconds"] = float(values["idle_limit_seconds"])
    return ServiceConfig(**values)

"""Engine configuration: shipped defaults, config file, environment overrides.

The config file is JSON with the same field names as :class:`EngineConfig`.
``CLOUDSELECT_CATALOG``, ``CLOUDSELECT_HISTORY``, ``CLOUDSELECT_PORT`` and
``CLOUDSELECT_HOST`` override the file for deployment knobs.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import BadRequestError
from .ga import GAParams
from .matching import DEFAULT_VAGUE_MAPPING, JOIN_POLICIES


@dataclass(frozen=True)
class EngineConfig:
    catalog_path: str = "fixtures/catalog_default.json"
    history_path: str | None = "history.log"
    host: str = "127.0.0.1"
    port: int = 8000
    compatibility_policy: str = "same-region"
    cr_threshold: float = 0.10
    popularity_recommended_weight: float = 0.1
    vague_mapping: dict = field(default_factory=lambda: json.loads(json.dumps(DEFAULT_VAGUE_MAPPING)))
    ga: GAParams = field(default_factory=GAParams)

    def __post_init__(self):
        if self.compatibility_policy not in JOIN_POLICIES:
            raise BadRequestError(
                f"compatibility_policy must be one of {', '.join(JOIN_POLICIES)}",
                parameter="compatibility_policy",
            )


def load_config(path: str | Path | None = None) -> EngineConfig:
    config = EngineConfig()
    if path is not None:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        ga_raw = raw.pop("ga", None)
        known = {k: v for k, v in raw.items() if k in EngineConfig.__dataclass_fields__}
        unknown = set(raw) - set(known)
        if unknown:
            raise BadRequestError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if ga_raw is not None:
            known["ga"] = GAParams(**ga_raw)
        config = replace(config, **known)

    env_catalog = os.environ.get("CLOUDSELECT_CATALOG")
    if env_catalog:
        config = replace(config, catalog_path=env_catalog)
    env_history = os.environ.get("CLOUDSELECT_HISTORY")
    if env_history:
        config = replace(config, history_path=env_history)
    env_port = os.environ.get("CLOUDSELECT_PORT")
    if env_port:
        config = replace(config, port=int(env_port))
    env_host = os.environ.get("CLOUDSELECT_HOST")
    if env_host:
        config = replace(config, host=env_host)
    return config

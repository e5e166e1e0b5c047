"""Flat ``key = value`` experiment configuration files.

Keys are :class:`ExperimentConfig` field names; Chebyshev overrides use
dotted keys (``chebyshev.c0 = 1.0``).  Lists are comma-separated and ``#``
starts a comment.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import fields
from pathlib import Path

from .errors import ConfigParse
from .experiments import ExperimentConfig

_INT = {"trials", "base_seed", "s_stride", "denominator_factor", "workers"}
_FLOAT = {"r_max"}
_INT_LIST = {"k_values", "n_values"}
_STR_LIST = {"estimators"}
_CHEBYSHEV = {"c0", "c1", "nu"}
_FIELDS = {f.name for f in fields(ExperimentConfig)}


def _convert(key: str, raw: str):
    if key in _INT:
        return int(raw)
    if key in _FLOAT:
        return float(raw)
    if key in _INT_LIST:
        return tuple(int(x) for x in raw.split(",") if x.strip())
    if key in _STR_LIST:
        return tuple(x.strip() for x in raw.split(",") if x.strip())
    return raw


def parse_config_text(text: str) -> dict:
    """Parse config text into keyword arguments for :class:`ExperimentConfig`."""
    out: dict = {}
    cheb: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParse("expected 'key = value'", line=lineno)
        key, raw = (part.strip() for part in line.split("=", 1))
        if not raw:
            raise ConfigParse(f"empty value for {key!r}", line=lineno)
        try:
            if key.startswith("chebyshev."):
                sub = key.split(".", 1)[1]
                if sub not in _CHEBYSHEV:
                    raise ConfigParse(f"unknown chebyshev key {sub!r}", line=lineno)
                cheb[sub] = float(raw)
            elif key in _FIELDS and key != "chebyshev":
                out[key] = _convert(key, raw)
            else:
                raise ConfigParse(f"unknown key {key!r}", line=lineno)
        except ValueError as exc:
            if isinstance(exc, ConfigParse):
                raise
            raise ConfigParse(f"bad value for {key!r}: {raw!r}", line=lineno) from None
    if cheb:
        out["chebyshev"] = cheb
    return out


def load_config(path, **overrides) -> ExperimentConfig:
    """Read a config file; non-``None`` overrides win over file values."""
    kwargs = parse_config_text(Path(path).read_text()) if path else {}
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**kwargs)


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the fields that affect results (not output path or workers)."""
    doc = {k: v for k, v in config.as_dict().items() if k not in ("output_path", "workers")}
    blob = json.dumps(doc, sort_keys=True, default=list)
    return hashlib.sha256(blob.encode()).hexdigest()

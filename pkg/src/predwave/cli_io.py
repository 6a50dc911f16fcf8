"""Serialization, configuration layering and run manifests for the CLI.

Results are lists of records. JSON keeps the nesting of ``as_dict``; CSV
flattens nested keys with dots (``zone_I.0``). :func:`parse_output` reads
either form back into flat records so the two encodings can be compared.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional

from .errors import ConfigurationError

ENV_PREFIX = "PREDWAVE_"
MANIFEST_NAME = "manifest.json"


def _clean(obj: Any) -> Any:
    """Make an object JSON-safe: NaN/inf -> None, tuples -> lists, numpy scalars -> float."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "tolist") and not isinstance(obj, (str, bytes)):
        return _clean(obj.tolist())
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    return obj


def to_json(obj: Any) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(_clean(obj), indent=2, sort_keys=False, allow_nan=False) + "\n"


def flatten(rec: Mapping, prefix: str = "") -> dict:
    out = {}
    for k, v in rec.items():
        key = f"{prefix}{k}"
        if isinstance(v, Mapping):
            out.update(flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            out.update(flatten({str(i): x for i, x in enumerate(v)}, key + "."))
        else:
            out[key] = v
    return out


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g") if math.isfinite(v) else ""
    return str(v)


def to_csv(records: Iterable[Mapping], columns: Optional[list[str]] = None) -> str:
    flat = [flatten(_clean(r)) for r in records]
    if columns is None:
        columns = []
        for r in flat:
            columns.extend(k for k in r if k not in columns)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in flat:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _parse_cell(s: str) -> Any:
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    try:
        return float(s)
    except ValueError:
        return s


def _normalize(v: Any) -> Any:
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, float)):
        return float(v)
    return v


def parse_output(text: str, fmt: str) -> list[dict]:
    """Flat records from JSON or CSV output of this tool."""
    if fmt == "json":
        data = json.loads(text)
        items = data if isinstance(data, list) else [data]
        return [{k: _normalize(v) for k, v in flatten(r).items()} for r in items]
    if fmt == "csv":
        rows = list(csv.reader(io.StringIO(text)))
        head, body = rows[0], rows[1:]
        return [dict(zip(head, map(_parse_cell, r))) for r in body]
    raise ConfigurationError(f"unknown format {fmt!r}")


def encode(records: list[dict], fmt: str, columns: Optional[list[str]] = None,
           single: bool = False) -> str:
    if fmt == "json":
        return to_json(records[0] if single and len(records) == 1 else records)
    if fmt == "csv":
        return to_csv(records, columns)
    raise ConfigurationError(f"unknown format {fmt!r}")


def read_config_file(path: str | os.PathLike) -> dict[str, str]:
    """Flat ``key = value`` file; '#' starts a comment, dashes in keys become underscores."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.lstrip("-").replace("-", "_")] = v
    return out


def env_overrides(keys: Iterable[str], environ: Optional[Mapping[str, str]] = None) -> dict:
    environ = os.environ if environ is None else environ
    out = {}
    for k in keys:
        name = ENV_PREFIX + k.upper()
        if name in environ:
            out[k] = environ[name]
    return out


def sha256_file(path: str | os.PathLike) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir: Path, manifest: dict) -> Path:
    path = out_dir / MANIFEST_NAME
    path.write_text(to_json(manifest))
    return path


def read_manifest(path: str | os.PathLike) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read manifest {path}: {exc}") from exc
    for key in ("command", "options"):
        if key not in data:
            raise ConfigurationError(f"manifest {path} lacks {key!r}")
    return data

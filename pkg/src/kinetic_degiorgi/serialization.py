"""Canonical JSON reports and grid-field files.

Reports are serialised with sorted keys, no whitespace variation and floats
printed with 17 significant digits, so parse-then-write is byte-identical.
Non-finite floats become the strings ``"nan"``, ``"inf"`` and ``"-inf"``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from . import SCHEMA_VERSION, __version__
from .kernels import GridField


class SchemaVersionError(ValueError):
    pass


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _encode(obj: Any, out: list) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        keys = sorted(obj)
        if any(not isinstance(k, str) for k in keys):
            raise TypeError("report keys must be strings")
        out.append("{")
        for i, k in enumerate(keys):
            if i:
                out.append(",")
            out.append(json.dumps(k, ensure_ascii=False))
            out.append(":")
            _encode(obj[k], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, v in enumerate(obj.tolist() if isinstance(obj, np.ndarray) else obj):
            if i:
                out.append(",")
            _encode(v, out)
        out.append("]")
    elif isinstance(obj, (np.bool_,)):
        out.append("true" if bool(obj) else "false")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def canonical_dumps(obj: Any) -> str:
    out: list[str] = []
    _encode(obj, out)
    return "".join(out) + "\n"


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(canonical_dumps(cfg).encode()).hexdigest()


def make_report(kind: str, payload: dict, cfg: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "tool_version": __version__, "kind": kind,
            "config": cfg, "config_hash": config_hash(cfg), "payload": payload}


def write_report(path, report: dict) -> Path:
    path = Path(path)
    path.write_text(canonical_dumps(report), encoding="utf-8")
    return path


def parse_report(text: str) -> dict:
    rep = json.loads(text)
    if not isinstance(rep, dict) or "schema_version" not in rep:
        raise SchemaVersionError("not a report: missing schema_version")
    v = rep["schema_version"]
    if v != SCHEMA_VERSION:
        raise SchemaVersionError(f"report schema version {v} is not supported (expected {SCHEMA_VERSION})")
    return rep


def read_report(path) -> dict:
    return parse_report(Path(path).read_text(encoding="utf-8"))


def report_roundtrip(path) -> str:
    """Parse then re-serialise; equal to the file bytes for canonical reports."""
    return canonical_dumps(read_report(path))


# ----------------------------------------------------------------- grid fields

def field_header(f: GridField) -> dict:
    return {"schema_version": SCHEMA_VERSION, "d": f.d, "t": f.t.tolist(),
            "x_axes": [a.tolist() for a in f.x_axes], "v_axes": [a.tolist() for a in f.v_axes],
            "far_field_v": f.far_field_v, "x_periodic": f.x_periodic, "nonnegative": f.nonnegative}


def _from_header(h: dict, values: np.ndarray) -> GridField:
    if h.get("schema_version") != SCHEMA_VERSION:
        raise SchemaVersionError(f"field schema version {h.get('schema_version')} is not supported")
    return GridField(np.array(h["t"], float), tuple(np.array(a, float) for a in h["x_axes"]),
                     tuple(np.array(a, float) for a in h["v_axes"]), values, float(h["far_field_v"]),
                     bool(h["x_periodic"]), bool(h["nonnegative"]))


def write_field_csv(stem, f: GridField) -> tuple[Path, Path]:
    """``<stem>.csv`` with columns t, x*, v*, f (17 digits) and ``<stem>.json``."""
    stem = Path(stem)
    csv_path, json_path = stem.with_suffix(".csv"), stem.with_suffix(".json")
    d = f.d
    header = ["t", *(f"x{i + 1}" for i in range(d)), *(f"v{i + 1}" for i in range(d)), "f"]
    mesh = np.meshgrid(f.t, *f.x_axes, *f.v_axes, indexing="ij")
    cols = [m.ravel() for m in mesh] + [f.values.ravel()]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*cols):
        w.writerow([format(float(c), ".17g") for c in row])
    csv_path.write_text(buf.getvalue(), encoding="utf-8")
    json_path.write_text(canonical_dumps(field_header(f)), encoding="utf-8")
    return csv_path, json_path


def read_field_csv(stem) -> GridField:
    stem = Path(stem)
    h = json.loads(stem.with_suffix(".json").read_text(encoding="utf-8"))
    data = np.loadtxt(stem.with_suffix(".csv"), delimiter=",", skiprows=1, ndmin=2)
    shape = (len(h["t"]), *(len(a) for a in h["x_axes"]), *(len(a) for a in h["v_axes"]))
    return _from_header(h, data[:, -1].reshape(shape))


def write_field_npz(path, f: GridField) -> Path:
    """Binary variant; values and axes are stored bit-exactly."""
    path = Path(path)
    with open(path, "wb") as fh:
        np.savez(fh, values=f.values, t=f.t, header=np.frombuffer(canonical_dumps(field_header(f)).encode(), np.uint8),
                 **{f"x{i}": a for i, a in enumerate(f.x_axes)}, **{f"v{i}": a for i, a in enumerate(f.v_axes)})
    return path


def read_field_npz(path) -> GridField:
    with np.load(Path(path)) as z:
        h = json.loads(bytes(z["header"]).decode())
        d = h["d"]
        h["t"] = z["t"]
        h["x_axes"] = [z[f"x{i}"] for i in range(d)]
        h["v_axes"] = [z[f"v{i}"] for i in range(d)]
        return _from_header(h, z["values"].copy())

"""On-disk formats.

Calibration (JSON)::

    {"dt_seconds": 2.22e-10, "eplg": 0.012, "unit": "dt" | "us",
     "qubits": [{"id": 0, "t1": 232, "t2": 150, "p01": 0.0186, "p10": 0.014}]}

``unit`` is mandatory; ``"us"`` times are converted to dt on ingest.

Outcome series (CSV)::

    # seed=7, spec=<16-hex digest>, kind=bit, shots=32768
    # spec_json={...}
    # manifest=<file name>        (optional)
    0
    1
    ...

Comparison report (CSV) columns: ``id,c_pred,c_real,delta,color``.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .cltstats import RsdCurve, classify_delta_c
from .errors import ParseError
from .model import DeviceCalibration, QubitCalibration, validate_calibration
from .sim import OutcomeSeries

log = logging.getLogger(__name__)

US = 1e-6


# -- calibration -------------------------------------------------------------


def _number(obj: dict, key: str, path: str) -> float:
    if key not in obj:
        raise ParseError(f"missing required field '{key}'", where=path or "$")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ParseError(f"'{key}' must be a finite number, got {v!r}", where=f"{path}.{key}" if path else key)
    return float(v)


def calibration_from_dict(data: dict) -> DeviceCalibration:
    if not isinstance(data, dict):
        raise ParseError("calibration must be a JSON object", where="$")
    dt = _number(data, "dt_seconds", "")
    eplg = _number(data, "eplg", "")
    unit = data.get("unit")
    if unit not in ("dt", "us"):
        raise ParseError(f"'unit' must be 'dt' or 'us', got {unit!r}", where="unit")
    if dt <= 0:
        raise ParseError(f"must be > 0, got {dt}", where="dt_seconds")
    scale = US / dt if unit == "us" else 1.0
    rows = data.get("qubits")
    if not isinstance(rows, list) or not rows:
        raise ParseError("'qubits' must be a non-empty list", where="qubits")
    qubits = []
    for i, row in enumerate(rows):
        path = f"qubits[{i}]"
        if not isinstance(row, dict):
            raise ParseError("qubit entry must be an object", where=path)
        if "id" not in row or isinstance(row["id"], bool) or not isinstance(row["id"], int):
            raise ParseError("'id' must be an integer", where=f"{path}.id")
        qubits.append(QubitCalibration(
            id=row["id"],
            t1=_number(row, "t1", path) * scale,
            t2=_number(row, "t2", path) * scale,
            p01=_number(row, "p01", path),
            p10=_number(row, "p10", path),
        ))
    cal = DeviceCalibration(dt, eplg, tuple(qubits))
    diags = validate_calibration(cal)
    errors = [d for d in diags if d.level == "error"]
    for d in diags:
        if d.level == "warning":
            log.warning("calibration: %s", d)
    if errors:
        raise ParseError("; ".join(str(d) for d in errors), where="calibration")
    return cal


def load_calibration(path) -> DeviceCalibration:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", where=f"{path}:{exc.lineno}:{exc.colno}") from exc
    return calibration_from_dict(data)


def calibration_to_dict(cal: DeviceCalibration, unit: str = "dt") -> dict:
    scale = 1.0 if unit == "dt" else cal.dt_seconds / US
    return {
        "dt_seconds": cal.dt_seconds,
        "eplg": cal.eplg,
        "unit": unit,
        "qubits": [
            {"id": q.id, "t1": q.t1 * scale, "t2": q.t2 * scale, "p01": q.p01, "p10": q.p10}
            for q in cal.qubits
        ],
    }


# -- outcome series ----------------------------------------------------------

_HEADER_RE = re.compile(r"^#\s*(\w+)=(.*)$")


def series_text(series: OutcomeSeries, manifest: str | None = None) -> str:
    buf = io.StringIO()
    buf.write(f"# seed={series.seed}, spec={series.spec_hash}, kind={series.kind}, shots={len(series)}\n")
    buf.write(f"# spec_json={json.dumps(series.spec, sort_keys=True, default=str)}\n")
    if manifest:
        buf.write(f"# manifest={manifest}\n")
    if series.kind == "bit":
        buf.write("\n".join(map(str, series.values.tolist())))
    else:
        buf.write("\n".join(repr(float(v)) for v in series.values))
    buf.write("\n")
    return buf.getvalue()


def write_series(series: OutcomeSeries, path, manifest: str | None = None):
    Path(path).write_text(series_text(series, manifest))


def read_series(path) -> OutcomeSeries:
    meta: dict = {}
    values = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# spec_json="):
                meta["spec_json"] = line[len("# spec_json="):]
                continue
            for part in line[1:].split(","):
                m = _HEADER_RE.match("#" + part.strip())
                if m:
                    meta[m.group(1)] = m.group(2).strip()
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ParseError(f"not a number: {line!r}", where=f"{path}:{lineno}") from None
    if not values:
        raise ParseError("series has no values", where=str(path))
    kind = meta.get("kind", "bit" if set(values) <= {0.0, 1.0} else "real")
    spec = json.loads(meta["spec_json"]) if "spec_json" in meta else {}
    try:
        seed = int(meta.get("seed", 0))
    except ValueError:
        raise ParseError(f"bad seed {meta.get('seed')!r}", where=f"{path}:1") from None
    if "shots" in meta and int(meta["shots"]) != len(values):
        raise ParseError(f"header says {meta['shots']} shots, file has {len(values)}", where=str(path))
    return OutcomeSeries(np.array(values), seed, spec, kind=kind)


def write_curve(curve: RsdCurve, path):
    Path(path).write_text(curve.to_csv())


# -- comparison reports ------------------------------------------------------


@dataclass(frozen=True)
class ReportRow:
    id: str
    c_pred: float
    c_real: float

    @property
    def delta(self) -> float:
        return abs(self.c_pred - self.c_real)

    @property
    def color(self) -> str:
        return classify_delta_c(self.delta)


def read_c_table(path, prefer: str) -> dict[str, float]:
    """Read ``id`` plus a c column (``prefer`` or plain ``c``) from a CSV."""
    text = Path(path).read_text()
    reader = csv.DictReader(line for line in io.StringIO(text) if not line.startswith("#"))
    if reader.fieldnames is None or "id" not in reader.fieldnames:
        raise ParseError("CSV needs an 'id' column", where=str(path))
    col = prefer if prefer in reader.fieldnames else "c" if "c" in reader.fieldnames else None
    if col is None:
        raise ParseError(f"CSV needs a '{prefer}' or 'c' column", where=str(path))
    out = {}
    for lineno, row in enumerate(reader, start=2):
        try:
            out[row["id"].strip()] = float(row[col])
        except (TypeError, ValueError):
            raise ParseError(f"bad value in column {col!r}", where=f"{path}:{lineno}") from None
    return out


def compare_tables(pred: dict[str, float], real: dict[str, float]) -> tuple[list[ReportRow], list[str]]:
    """Join on id. Returns rows (in prediction order) and the unmatched ids."""
    rows = [ReportRow(i, pred[i], real[i]) for i in pred if i in real]
    unmatched = sorted(set(pred) ^ set(real), key=_natural)
    return rows, unmatched


def _natural(s: str):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", s)]


def report_csv(rows: list[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "c_pred", "c_real", "delta", "color"])
    for r in rows:
        w.writerow([r.id, f"{r.c_pred:.6g}", f"{r.c_real:.6g}", f"{r.delta:.6g}", r.color])
    return buf.getvalue()


# -- provenance --------------------------------------------------------------


def file_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path, command: str, argv: list[str], seed: int | None, inputs, outputs) -> dict:
    manifest = {
        "command": command,
        "argv": list(argv),
        "seed": seed,
        "inputs": {str(p): file_hash(p) for p in inputs if p and Path(p).is_file()},
        "outputs": [str(p) for p in outputs],
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def synthetic_calibration() -> DeviceCalibration:
    """The bundled 8-qubit calibration used when no file is given."""
    from importlib import resources

    text = resources.files("shotvar.data").joinpath("synthetic_calibration.json").read_text()
    return calibration_from_dict(json.loads(text))

"""Shared domain types, unit conventions and calibration validation.

Conventions used throughout the package:

* every logarithm in a c-intercept is base 2;
* times are stored in units of the device pulse time ``dt`` (seconds are
  converted on ingest using ``DeviceCalibration.dt_seconds``);
* a decay *probability* is ``1 - exp(-t/T)``, a *survival* factor is
  ``exp(-t/T)``.
"""

from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
import math
import re
from dataclasses import dataclass

from .errors import DomainError, ParseError


class WaitKind(str, enum.Enum):
    ID = "id"
    X = "x"
    H = "h"


@dataclass(frozen=True)
class QubitCalibration:
    id: int
    t1: float  # dt units
    t2: float  # dt units
    p01: float  # P(read 1 | prepared 0)
    p10: float  # P(read 0 | prepared 1)


@dataclass(frozen=True)
class DeviceCalibration:
    dt_seconds: float
    eplg: float
    qubits: tuple[QubitCalibration, ...]

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    def qubit(self, qid: int) -> QubitCalibration:
        for q in self.qubits:
            if q.id == qid:
                return q
        raise DomainError(f"no qubit with id {qid} in calibration")


@dataclass(frozen=True)
class CircuitSpec:
    """Description of one experiment circuit.

    ``basis`` selects the circuit family: ``"z"`` is H-wait-measure (T1
    coin), ``"x"`` is H-wait-H-measure (T2 coin) and ``"pauli"`` is the
    Hartree-Fock + excitation-preserving ansatz measured against a Pauli
    Hamiltonian. ``depth`` is the total duration in dt units and defaults to
    one dt per wait gate.
    """

    n_qubits: int = 1
    wait_kind: WaitKind = WaitKind.ID
    wait_reps: int = 0
    depth: float | None = None
    pre_measure: bool = False
    basis: str = "z"
    ansatz_reps: int = 0
    angles: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "wait_kind", WaitKind(self.wait_kind))
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        if self.depth is None:
            object.__setattr__(self, "depth", float(self.wait_reps))
        if self.n_qubits < 1:
            raise DomainError("n_qubits must be >= 1")
        if self.wait_reps < 0 or self.depth < self.wait_reps:
            raise DomainError(
                f"need depth >= wait_reps >= 0, got depth={self.depth}, wait_reps={self.wait_reps}"
            )
        if self.basis not in ("z", "x", "pauli"):
            raise DomainError(f"unknown basis {self.basis!r}")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["wait_kind"] = self.wait_kind.value
        d["angles"] = list(self.angles)
        return d

    def digest(self) -> str:
        return digest(self.to_dict())


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "error" or "warning"
    field: str
    message: str
    qubit: int | None = None

    def __str__(self):
        where = f"qubit {self.qubit}: " if self.qubit is not None else ""
        return f"[{self.level}] {where}{self.field}: {self.message}"


class NormalizedTime(float):
    """Dimensionless time ``t/T``. Behaves as a plain float."""

    def __new__(cls, tau):
        tau = float(tau)
        if not tau >= 0:
            raise DomainError(f"normalized time must be >= 0, got {tau}")
        return super().__new__(cls, tau)

    @property
    def tau(self) -> float:
        return float(self)


def normalize_time(t: float, T: float) -> NormalizedTime:
    if not T > 0:
        raise DomainError(f"time constant must be > 0, got {T}")
    if t < 0:
        raise DomainError(f"time must be >= 0, got {t}")
    return NormalizedTime(t / T)


def validate_calibration(cal: DeviceCalibration) -> list[Diagnostic]:
    """Check calibration invariants.

    Returns an empty list when everything holds. Violations come back as
    ``error`` diagnostics; ``t2 > 2*t1`` (unphysical but seen on real
    devices) is only a ``warning``. Output is sorted so the result does not
    depend on qubit order.
    """
    out = []
    if not (isinstance(cal.dt_seconds, (int, float)) and cal.dt_seconds > 0):
        out.append(Diagnostic("error", "dt_seconds", f"must be > 0, got {cal.dt_seconds}"))
    if not (0 <= cal.eplg < 1):
        out.append(Diagnostic("error", "eplg", f"must lie in [0, 1), got {cal.eplg}"))
    seen = {}
    for q in cal.qubits:
        seen[q.id] = seen.get(q.id, 0) + 1
        for name in ("t1", "t2"):
            v = getattr(q, name)
            if not v > 0:
                out.append(Diagnostic("error", name, f"must be > 0, got {v}", q.id))
        for name in ("p01", "p10"):
            v = getattr(q, name)
            if not 0 <= v < 1:
                out.append(Diagnostic("error", name, f"must lie in [0, 1), got {v}", q.id))
        if q.t1 > 0 and q.t2 > 2 * q.t1:
            out.append(
                Diagnostic("warning", "t2", f"t2={q.t2} exceeds 2*t1={2 * q.t1} (unphysical)", q.id)
            )
    for qid, count in seen.items():
        if count > 1:
            out.append(Diagnostic("error", "id", f"qubit id repeated {count} times", qid))
    out.sort(key=lambda d: (d.qubit if d.qubit is not None else -1, d.field, d.level, d.message))
    return out


_WAIT_RE = re.compile(r"^\s*(\d+)\s*(id|x|h)\s*$", re.IGNORECASE)


def parse_wait(text: str) -> tuple[int, WaitKind]:
    """Parse table shorthand such as ``10h``, ``1000x`` or ``100id``."""
    m = _WAIT_RE.match(text)
    if not m:
        raise ParseError(f"bad wait encoding {text!r}; expected e.g. 100x, 10h, 1000id")
    return int(m.group(1)), WaitKind(m.group(2).lower())


def wait_label(reps: int, kind: WaitKind) -> str:
    return f"{reps}{WaitKind(kind).value}"


def digest(obj) -> str:
    """Short stable hash of a JSON-serialisable object."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_json_default)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _json_default(o):
    if dataclasses.is_dataclass(o):
        return dataclasses.asdict(o)
    if isinstance(o, enum.Enum):
        return o.value
    if isinstance(o, float) and not math.isfinite(o):
        return repr(o)
    raise TypeError(f"not serialisable: {type(o).__name__}")

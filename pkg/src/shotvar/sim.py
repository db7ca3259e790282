"""Seedable Monte Carlo ground truth.

Two engines live here:

* closed-form single-qubit coin samplers (fair coin, SPAM, T1 and T2
  circuits), each a Bernoulli draw with the appropriate probability of
  *reading* 1;
* a dense density-matrix engine (at most six qubits) used for wait circuits
  built from real X/H gates and for the Hartree-Fock + excitation-preserving
  ansatz measured against a Pauli Hamiltonian.

Damping is applied on a uniform schedule over the declared circuit depth.
Gate noise is single-qubit depolarizing with strength ``eplg / 2`` after
each physical gate (RZ is a virtual frame change and is noiseless).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DomainError
from .model import CircuitSpec, DeviceCalibration, QubitCalibration, WaitKind, digest
from .observable import MAX_DENSE_QUBITS, PauliHamiltonian
from .rng import stream

TOL = 1e-10

H_GATE = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
X_GATE = np.array([[0, 1], [1, 0]], dtype=complex)
Y_GATE = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z_GATE = np.array([[1, 0], [0, -1]], dtype=complex)
SDG_GATE = np.diag([1, -1j]).astype(complex)
WAIT_GATES = {WaitKind.ID: np.eye(2, dtype=complex), WaitKind.X: X_GATE, WaitKind.H: H_GATE}


@dataclass
class OutcomeSeries:
    values: np.ndarray
    seed: int
    spec: dict = field(default_factory=dict)
    kind: str = "bit"  # "bit" or "real"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int8 if self.kind == "bit" else float)
        if self.kind == "bit" and not np.isin(self.values, (0, 1)).all():
            raise DomainError("bit series must contain only 0 and 1")

    def __len__(self):
        return len(self.values)

    @property
    def spec_hash(self) -> str:
        return digest(self.spec)

    def mean(self) -> float:
        return float(np.mean(self.values))


@dataclass(frozen=True)
class NoiseChannelParams:
    gamma1: float = 0.0
    gamma2: float = 0.0
    gate_eps: float = 0.0

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "gate_eps"):
            v = getattr(self, name)
            if not 0 <= v < 1:
                raise DomainError(f"{name} must lie in [0, 1), got {v}")


def _check_prob(name: str, p: float):
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {p}")


def effective_p1_spam(p1: float, p01: float, p10: float) -> float:
    """Probability of *reading* 1 when the ideal outcome is 1 with ``p1``."""
    for name, v in (("p1", p1), ("p01", p01), ("p10", p10)):
        _check_prob(name, v)
    return p1 + p01 * (1.0 - p1) - p10 * p1


def survival(t: float, T: float, stretch: float = 1.0) -> float:
    """``exp(-(t/T)**k)``: the fraction of population/coherence left."""
    if not T > 0:
        raise DomainError(f"time constant must be > 0, got {T}")
    if t < 0:
        raise DomainError(f"time must be >= 0, got {t}")
    return math.exp(-((t / T) ** stretch))


def t1_read_probability(q: QubitCalibration, t: float, stretch: float = 1.0) -> float:
    # H puts half the population in |1>; decay probability eps_d = 1 - survival.
    p1 = 0.5 * survival(t, q.t1, stretch)
    return effective_p1_spam(p1, q.p01, q.p10)


def t2_read_probability(q: QubitCalibration, t: float, stretch: float = 1.0) -> float:
    # H-wait-H: P(0) = (1 + e^{-t/T2}) / 2 under pure dephasing.
    p1 = 0.5 * (1.0 - survival(t, q.t2, stretch))
    return effective_p1_spam(p1, q.p01, q.p10)


def _bernoulli(p: float, shots: int, seed: int, *labels) -> np.ndarray:
    if shots < 1:
        raise DomainError(f"shots must be >= 1, got {shots}")
    u = stream(seed, "bits", *labels).random(shots)
    return (u < p).astype(np.int8)


def sample_coin(p1: float, shots: int, seed: int) -> OutcomeSeries:
    _check_prob("p1", p1)
    bits = _bernoulli(p1, shots, seed)
    return OutcomeSeries(bits, seed, {"experiment": "coin", "p1": p1, "shots": shots})


def sample_spam_coin(p1: float, p01: float, p10: float, shots: int, seed: int) -> OutcomeSeries:
    p = effective_p1_spam(p1, p01, p10)
    bits = _bernoulli(p, shots, seed)
    return OutcomeSeries(
        bits, seed, {"experiment": "spam", "p1": p1, "p01": p01, "p10": p10, "shots": shots}
    )


def sample_t1_coin(cal: QubitCalibration, t: float, shots: int, seed: int,
                   stretch: float = 1.0) -> OutcomeSeries:
    p = t1_read_probability(cal, t, stretch)
    bits = _bernoulli(p, shots, seed)
    spec = {"experiment": "t1", "qubit": _qdict(cal), "t": t, "stretch": stretch, "shots": shots}
    return OutcomeSeries(bits, seed, spec)


def sample_t2_coin(cal: QubitCalibration, t: float, pre_measure: bool, shots: int, seed: int,
                   stretch: float = 1.0) -> OutcomeSeries:
    # pre_measure is a hardware mitigation knob; the ideal model ignores it.
    p = t2_read_probability(cal, t, stretch)
    bits = _bernoulli(p, shots, seed)
    spec = {"experiment": "t2", "qubit": _qdict(cal), "t": t, "pre_measure": bool(pre_measure),
            "stretch": stretch, "shots": shots}
    return OutcomeSeries(bits, seed, spec)


def _qdict(q: QubitCalibration) -> dict:
    return {"id": q.id, "t1": q.t1, "t2": q.t2, "p01": q.p01, "p10": q.p10}


# -- density matrices -------------------------------------------------------


def zero_state(n_qubits: int) -> np.ndarray:
    dim = 2**n_qubits
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def basis_state(bits) -> np.ndarray:
    idx = int("".join(str(int(b)) for b in bits), 2)
    dim = 2 ** len(bits)
    rho = np.zeros((dim, dim), dtype=complex)
    rho[idx, idx] = 1.0
    return rho


def n_qubits_of(rho: np.ndarray) -> int:
    n = int(round(math.log2(rho.shape[0])))
    if rho.shape != (2**n, 2**n):
        raise DomainError(f"density matrix has shape {rho.shape}")
    return n


def check_density_matrix(rho: np.ndarray, tol: float = TOL):
    """Raise DomainError unless rho is Hermitian, unit-trace and PSD within tol."""
    if np.abs(rho - rho.conj().T).max() > tol:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise DomainError(f"density matrix trace {np.trace(rho).real} != 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise DomainError("density matrix has negative eigenvalues")


def _left_apply(op: np.ndarray, mat: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    k = len(targets)
    dim = mat.shape[0]
    t = mat.reshape((2,) * n + (dim,))
    opt = op.reshape((2,) * (2 * k))
    out = np.tensordot(opt, t, axes=(list(range(k, 2 * k)), list(targets)))
    out = np.moveaxis(out, list(range(k)), list(targets))
    return out.reshape(dim, dim)


def _conjugate(op: np.ndarray, rho: np.ndarray, targets, n: int) -> np.ndarray:
    # K rho K^dag == K (K rho)^dag for Hermitian rho
    a = _left_apply(op, rho, targets, n)
    return _left_apply(op, a.conj().T, targets, n)


def _targets(targets, n: int) -> tuple[int, ...]:
    targets = tuple(int(t) for t in np.atleast_1d(targets))
    if len(set(targets)) != len(targets) or any(not 0 <= t < n for t in targets):
        raise DomainError(f"bad targets {targets} for {n} qubits")
    return targets


def apply_kraus(rho: np.ndarray, kraus, targets) -> np.ndarray:
    n = n_qubits_of(rho)
    targets = _targets(targets, n)
    out = np.zeros_like(rho)
    for k in kraus:
        out += _conjugate(np.asarray(k, dtype=complex), rho, targets, n)
    return out


def apply_gate(rho: np.ndarray, gate: np.ndarray, targets) -> np.ndarray:
    gate = np.asarray(gate, dtype=complex)
    n = n_qubits_of(rho)
    targets = _targets(targets, n)
    if gate.shape != (2 ** len(targets),) * 2:
        raise DomainError(f"gate shape {gate.shape} does not match {len(targets)} targets")
    if np.abs(gate.conj().T @ gate - np.eye(gate.shape[0])).max() > TOL:
        raise DomainError("gate is not unitary")
    return _conjugate(gate, rho, targets, n)


def damping_kraus(gamma1: float, gamma2: float) -> list[np.ndarray]:
    """Kraus operators reproducing the combined T1/T2 channel.

    Populations follow amplitude damping with survival ``1 - gamma1`` and the
    off-diagonal element is scaled by exactly ``1 - gamma2``. Coherence cannot
    outlive population decay (the ``T2 > 2 T1`` case); there the dephasing
    factor is capped at 1.
    """
    for name, v in (("gamma1", gamma1), ("gamma2", gamma2)):
        _check_prob(name, v)
    s1 = 1.0 - gamma1
    amp = [
        np.array([[1, 0], [0, math.sqrt(s1)]], dtype=complex),
        np.array([[0, math.sqrt(gamma1)], [0, 0]], dtype=complex),
    ]
    f = min(1.0, (1.0 - gamma2) / math.sqrt(s1)) if s1 > 0 else 1.0
    deph = [math.sqrt((1 + f) / 2) * np.eye(2, dtype=complex), math.sqrt((1 - f) / 2) * Z_GATE]
    return [d @ a for d in deph for a in amp]


def apply_damping(rho: np.ndarray, qubit: int, gamma1: float, gamma2: float) -> np.ndarray:
    return apply_kraus(rho, damping_kraus(gamma1, gamma2), (qubit,))


def depolarizing_kraus(p: float) -> list[np.ndarray]:
    """rho -> (1 - p) rho + p I/2."""
    _check_prob("p", p)
    return [
        math.sqrt(1 - 3 * p / 4) * np.eye(2, dtype=complex),
        math.sqrt(p / 4) * X_GATE,
        math.sqrt(p / 4) * Y_GATE,
        math.sqrt(p / 4) * Z_GATE,
    ]


def apply_depolarizing(rho: np.ndarray, qubit: int, p: float) -> np.ndarray:
    if p == 0:
        return rho
    return apply_kraus(rho, depolarizing_kraus(p), (qubit,))


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def xx_plus_yy(theta: float) -> np.ndarray:
    """``exp(-i theta (XX + YY) / 4)``: rotates within span{|01>, |10>}."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[1, 0, 0, 0], [0, c, -1j * s, 0], [0, -1j * s, c, 0], [0, 0, 0, 1]], dtype=complex
    )


class _Schedule:
    """Uniform damping schedule: each call to ``advance`` moves the clock by
    ``step`` dt and damps every qubit by the survival ratio over that step."""

    def __init__(self, qubits: list[QubitCalibration], step: float, stretch: float = 1.0):
        self.qubits = qubits
        self.step = step
        self.stretch = stretch
        self.clock = 0.0

    def advance(self, rho: np.ndarray) -> np.ndarray:
        if self.step <= 0:
            return rho
        t0, t1 = self.clock, self.clock + self.step
        self.clock = t1
        for i, q in enumerate(self.qubits):
            g1 = 1.0 - self._ratio(t0, t1, q.t1)
            g2 = 1.0 - self._ratio(t0, t1, q.t2)
            rho = apply_damping(rho, i, g1, g2)
        return rho

    def _ratio(self, t0: float, t1: float, T: float) -> float:
        s0 = survival(t0, T, self.stretch)
        return survival(t1, T, self.stretch) / s0 if s0 > 0 else 1.0


def wait_circuit_state(spec: CircuitSpec, q: QubitCalibration, eplg: float = 0.0,
                       stretch: float = 1.0) -> np.ndarray:
    """Single-qubit H, wait gates, (H for the x basis), before measurement.

    Only the wait gates carry depolarizing noise; the framing H gates are
    ideal, as in the closed-form coin models.
    """
    rho = apply_gate(zero_state(1), H_GATE, 0)
    reps = spec.wait_reps
    sched = _Schedule([q], spec.depth / reps if reps else spec.depth, stretch)
    gate = WAIT_GATES[spec.wait_kind]
    noisy = spec.wait_kind != WaitKind.ID
    if reps == 0:
        rho = sched.advance(rho)
    for _ in range(reps):
        rho = apply_gate(rho, gate, 0)
        if noisy:
            rho = apply_depolarizing(rho, 0, eplg / 2)
        rho = sched.advance(rho)
    if spec.basis == "x":
        rho = apply_gate(rho, H_GATE, 0)
    return rho


def hartree_fock_bits(H: PauliHamiltonian, n_electrons: int | None = None) -> tuple[int, ...]:
    """Lowest-energy computational basis state with ``n_electrons`` ones
    (default half filling), read off the diagonal of H."""
    n = H.n_qubits
    n_electrons = n // 2 if n_electrons is None else n_electrons
    diag = np.real(np.diag(H.matrix))
    best = None
    for idx in range(2**n):
        if bin(idx).count("1") != n_electrons:
            continue
        if best is None or diag[idx] < diag[best] - 1e-12:
            best = idx
    return tuple(int(b) for b in format(best, f"0{n}b"))


def n_ansatz_angles(n_qubits: int, reps: int) -> int:
    return reps * (2 * n_qubits - 1) + n_qubits


def ansatz_state(spec: CircuitSpec, cal: DeviceCalibration | None, H: PauliHamiltonian,
                 stretch: float = 1.0) -> np.ndarray:
    """Hartree-Fock initial state followed by ``spec.ansatz_reps`` layers of
    an excitation-preserving ansatz (RZ on every qubit, then XX+YY on each
    neighbouring pair), closed by a final RZ layer.

    ``spec.angles`` may be empty (all zero), a single value (broadcast) or
    the full list of ``n_ansatz_angles`` parameters.
    """
    n = spec.n_qubits
    if n > MAX_DENSE_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the simulator limit of {MAX_DENSE_QUBITS}")
    if H.n_qubits != n:
        raise DomainError(f"Hamiltonian acts on {H.n_qubits} qubits, circuit has {n}")
    reps = spec.ansatz_reps
    count = n_ansatz_angles(n, reps)
    angles = np.zeros(count) if not spec.angles else np.asarray(spec.angles, dtype=float)
    if angles.size == 1:
        angles = np.full(count, angles[0])
    if angles.size != count:
        raise DomainError(f"ansatz needs {count} angles, got {angles.size}")

    qubits = list(cal.qubits[:n]) if cal is not None else []
    if cal is not None and len(qubits) < n:
        raise DomainError(f"calibration has {cal.n_qubits} qubits, circuit needs {n}")
    eps = cal.eplg / 2 if cal is not None else 0.0

    hf = hartree_fock_bits(H)
    # layers: HF, then per rep one RZ layer + n-1 pair gates, then final RZ
    n_layers = 1 + reps * n + 1
    sched = _Schedule(qubits, spec.depth / n_layers if qubits else 0.0, stretch)

    rho = zero_state(n)
    for i, b in enumerate(hf):
        if b:
            rho = apply_gate(rho, X_GATE, i)
            rho = apply_depolarizing(rho, i, eps)
    rho = sched.advance(rho)

    it = iter(angles)
    for _ in range(reps):
        for i in range(n):
            rho = apply_gate(rho, rz(next(it)), i)
        rho = sched.advance(rho)
        for i in range(n - 1):
            rho = apply_gate(rho, xx_plus_yy(next(it)), (i, i + 1))
            rho = apply_depolarizing(rho, i, eps)
            rho = apply_depolarizing(rho, i + 1, eps)
            rho = sched.advance(rho)
    for i in range(n):
        rho = apply_gate(rho, rz(next(it)), i)
    rho = sched.advance(rho)
    return rho


_BASIS_CHANGE = {"X": H_GATE, "Y": H_GATE @ SDG_GATE}


def measure_observable(rho: np.ndarray, H: PauliHamiltonian, shots: int,
                       cal: DeviceCalibration | None, seed: int) -> OutcomeSeries:
    """Per-shot estimates of ``<H>``.

    Non-identity terms are split into qubit-wise commuting groups. Each shot
    measures one group chosen uniformly at random and reports
    ``const + G * sum_g`` (``G`` groups), so shots are i.i.d. and the series
    mean is an unbiased estimate of ``<H>``.
    """
    n = n_qubits_of(rho)
    if n > MAX_DENSE_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the simulator limit of {MAX_DENSE_QUBITS}")
    if H.n_qubits != n:
        raise DomainError(f"Hamiltonian acts on {H.n_qubits} qubits, state has {n}")
    if shots < 1:
        raise DomainError("shots must be >= 1")
    const = H.identity_coefficient
    groups = H.groups()
    spec = {"experiment": "observable", "shots": shots, "groups": len(groups)}
    if not groups:
        return OutcomeSeries(np.full(shots, const), seed, spec, kind="real")
    if cal is not None:
        if cal.n_qubits < n:
            raise DomainError(f"calibration has {cal.n_qubits} qubits, state has {n}")
        p01 = np.array([q.p01 for q in cal.qubits[:n]])
        p10 = np.array([q.p10 for q in cal.qubits[:n]])
    else:
        p01 = p10 = np.zeros(n)

    n_groups = len(groups)
    which = stream(seed, "groups").integers(n_groups, size=shots)
    values = np.empty(shots)
    for g_index, g in enumerate(groups):
        at = np.flatnonzero(which == g_index)
        if at.size == 0:
            continue
        r = rho
        for i, b in enumerate(g.basis):
            if b in _BASIS_CHANGE:
                r = apply_gate(r, _BASIS_CHANGE[b], i)
        probs = np.clip(np.real(np.diag(r)), 0.0, None)
        probs /= probs.sum()
        idx = stream(seed, "measure", g_index).choice(probs.size, size=at.size, p=probs)
        bits = (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1
        u = stream(seed, "readout", g_index).random((at.size, n))
        flip = np.where(bits == 0, u < p01, u < p10)
        bits = bits ^ flip
        signs = 1 - 2 * bits  # eigenvalue of Z per qubit
        total = np.zeros(at.size)
        for coeff, word in g.members:
            mask = np.array([ch != "I" for ch in word])
            total += coeff * np.prod(signs[:, mask], axis=1)
        values[at] = const + n_groups * total
    return OutcomeSeries(values, seed, spec, kind="real")


def run_experiment(spec: CircuitSpec, cal: DeviceCalibration, H: PauliHamiltonian | None = None,
                   shots: int = 2**15, seed: int = 0, qubit: int | None = None,
                   stretch: float = 1.0) -> OutcomeSeries:
    """Run the circuit described by ``spec`` and return per-shot outcomes.

    ``z``/``x`` bases are single-qubit coin experiments on ``qubit`` (default
    the first calibrated qubit). Identity waits use the closed-form sampler;
    X and H waits are evolved gate by gate. The ``pauli`` basis runs the
    ansatz on the first ``spec.n_qubits`` calibrated qubits and measures H.
    """
    meta = {"circuit": spec.to_dict(), "calibration": digest(cal), "stretch": stretch}
    if spec.basis == "pauli":
        if H is None:
            raise DomainError("pauli-basis experiment needs a Hamiltonian")
        if spec.n_qubits > cal.n_qubits:
            raise DomainError(f"circuit uses {spec.n_qubits} qubits, calibration has {cal.n_qubits}")
        rho = ansatz_state(spec, cal, H, stretch)
        out = measure_observable(rho, H, shots, cal, seed)
        out.spec.update(meta, hamiltonian=digest(H.terms))
        return out

    if spec.n_qubits != 1:
        raise DomainError("coin experiments use exactly one qubit")
    q = cal.qubit(qubit) if qubit is not None else cal.qubits[0]
    if spec.wait_kind == WaitKind.ID:
        if spec.basis == "z":
            out = sample_t1_coin(q, spec.depth, shots, seed, stretch)
        else:
            out = sample_t2_coin(q, spec.depth, spec.pre_measure, shots, seed, stretch)
    else:
        rho = wait_circuit_state(spec, q, cal.eplg, stretch)
        p = effective_p1_spam(float(np.clip(rho[1, 1].real, 0, 1)), q.p01, q.p10)
        bits = _bernoulli(p, shots, seed)
        out = OutcomeSeries(bits, seed, {"experiment": f"wait-{spec.basis}", "qubit": _qdict(q),
                                         "shots": shots})
    out.spec.update(meta)
    return out

"""Variance models for individual noise processes.

Only first-order noise terms are kept: with ``p`` independent noise sources
acting on ``n`` qubits the noise budget is a sum of ``p*n`` single-source
variances (plus the noiseless term), with no cross terms.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DomainError
from .model import DeviceCalibration, NormalizedTime


class Aggregate(str, enum.Enum):
    """How per-qubit T1/T2 values collapse to one value for n qubits."""

    MEDIAN = "median"
    MINIMUM = "minimum"  # conservative


@dataclass(frozen=True)
class DecayParams:
    tau: NormalizedTime
    k: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "tau", NormalizedTime(self.tau))
        if not self.k > 0:
            raise DomainError(f"stretch exponent must be > 0, got {self.k}")


@dataclass(frozen=True)
class NonMarkovParams:
    gamma0: float  # coupling strength
    lam: float  # spectral bandwidth
    t0: float = 0.0  # integration horizon

    def __post_init__(self):
        if not (self.gamma0 > 0 and self.lam > 0 and self.t0 >= 0):
            raise DomainError("need gamma0 > 0, lambda > 0 and t0 >= 0")

    @property
    def d(self) -> complex:
        return cmath.sqrt(self.lam**2 - 2 * self.gamma0 * self.lam)

    @property
    def real_d(self) -> bool:
        return self.lam**2 > 2 * self.gamma0 * self.lam


@dataclass(frozen=True)
class NoiseVarianceReport:
    t1: float
    t2: float
    gate: float
    readout: float = 0.0

    @property
    def total(self) -> float:
        return self.t1 + self.t2 + self.gate + self.readout


def lower_gamma(a: float, x: float) -> float:
    """Unregularised lower incomplete gamma ``int_0^x s^{a-1} e^{-s} ds``."""
    if x == 0:
        return 0.0
    return float(special.gammainc(a, x) * special.gamma(a))


def decay_moment(p: int, tau: float, k: float = 1.0) -> float:
    """``int_0^tau s^p exp(-s^k) ds = gamma((p+1)/k, tau^k) / k``."""
    if p < 0 or int(p) != p:
        raise DomainError(f"moment order must be a non-negative integer, got {p}")
    params = DecayParams(tau, k)
    return lower_gamma((p + 1) / params.k, params.tau**params.k) / params.k


def decay_first_second(tau: float) -> tuple[float, float]:
    tau = NormalizedTime(tau)
    e = math.exp(-tau)
    first = 1 - (tau + 1) * e
    return first, -tau * tau * e + 2 * first


def decay_variance(tau: float) -> float:
    """``1 - tau^2 e^{-tau} - (tau + 1)^2 e^{-2 tau}``, i.e. ``E2 - E1^2`` from
    :func:`decay_first_second`.

    Evaluated as ``g(3, tau) - g(2, tau)^2`` (lower incomplete gammas): the
    expanded form cancels catastrophically for small tau.
    """
    tau = NormalizedTime(tau)
    return lower_gamma(3, tau) - lower_gamma(2, tau) ** 2


def gate_walk_variance(depth_dt: float, eplg: float, n_qubits: int) -> float:
    """Random-walk gate noise: per-gate step ``eplg / 2`` in each of
    ``n_qubits`` dimensions for ``depth_dt`` steps, ``n D eplg^2 / 4``."""
    if depth_dt < 0 or eplg < 0 or n_qubits < 0:
        raise DomainError("depth, eplg and n_qubits must be >= 0")
    return n_qubits * depth_dt * eplg**2 / 4


def readout_bit_variance(p: float, q: float, bit_index: int = 0, fractional: bool = True) -> float:
    """Variance of bit ``i`` under flips 1->0 with ``p`` and 0->1 with ``q``.

    ``|(1 - p + q)(p - q)|`` weighted by ``2^-i`` when the bits form a binary
    fraction (default) or ``2^i`` when they form an integer.
    """
    if not (0 <= p <= 1 and 0 <= q <= 1):
        raise DomainError("p and q must lie in [0, 1]")
    if bit_index < 0:
        raise DomainError("bit index must be >= 0")
    weight = 2.0 ** (-bit_index if fractional else bit_index)
    return abs((1 - p + q) * (p - q)) * weight


def aggregate_times(cal: DeviceCalibration, policy: Aggregate = Aggregate.MEDIAN,
                    qubits=None) -> tuple[float, float]:
    """Representative ``(T1, T2)`` over the chosen qubits."""
    qs = [q for q in cal.qubits if qubits is None or q.id in set(qubits)]
    if not qs:
        raise DomainError("no qubits selected")
    reduce = np.median if Aggregate(policy) == Aggregate.MEDIAN else np.min
    return float(reduce([q.t1 for q in qs])), float(reduce([q.t2 for q in qs]))


def closed_form_noise_variance(n_qubits: int, shots: int, tau1: float, tau2: float,
                               t: float, g: float) -> NoiseVarianceReport:
    """Per-source split of
    ``(n / 2s)(2 - tau1^2 e^-tau1 - tau2^2 e^-tau2 - (tau1+1)^2 e^-2tau1
    - (tau2+1)^2 e^-2tau2 + t g^2 / 2)``.
    """
    if shots < 1:
        raise DomainError("shots must be >= 1")
    scale = n_qubits / (2 * shots)
    return NoiseVarianceReport(
        t1=scale * decay_variance(tau1),
        t2=scale * decay_variance(tau2),
        gate=gate_walk_variance(t, g, n_qubits) / shots,
    )


def closed_form_total(n_qubits: int, shots: int, tau1: float, tau2: float, t: float, g: float) -> float:
    """The same expression evaluated verbatim, term by term."""
    e = math.exp
    bracket = (2 - tau1**2 / e(tau1) - tau2**2 / e(tau2) - (tau1 + 1) ** 2 / e(2 * tau1)
               - (tau2 + 1) ** 2 / e(2 * tau2) + t * g**2 / 2)
    return n_qubits / (2 * shots) * bracket


# -- non-Markovian (damped Jaynes-Cummings) decay ---------------------------


def nonmarkov_G(t: float, params: NonMarkovParams) -> float:
    """``G(t) = e^{-lam t/2} ((lam/d) sinh(d t/2) + cosh(d t/2))``.

    Evaluated in complex arithmetic so an imaginary ``d`` (strong coupling)
    gives the oscillating real result; ``d = 0`` uses its limit.
    """
    if t < 0:
        raise DomainError("t must be >= 0")
    lam, d = params.lam, params.d
    if abs(d) < 1e-12:
        bracket = lam * t / 2 + 1
    else:
        bracket = (lam / d) * cmath.sinh(d * t / 2) + cmath.cosh(d * t / 2)
    return float((cmath.exp(-lam * t / 2) * bracket).real)


def nonmarkov_moment_quad(p: int, params: NonMarkovParams) -> float:
    """``int_0^t0 t^p |G(t)|^2 dt`` by adaptive quadrature."""
    if params.t0 == 0:
        return 0.0
    val, _ = integrate.quad(lambda t: t**p * nonmarkov_G(t, params) ** 2, 0.0, params.t0,
                            epsabs=0.0, epsrel=1e-13, limit=200)
    return float(val)


def nonmarkov_moment(p: int, params: NonMarkovParams) -> float:
    """Closed form of ``int_0^t0 t^p |G(t)|^2 dt`` in the real-``d`` regime.

    With ``k = (lam + d)/2`` and ``k' = (lam - d)/2``,
    ``G = (k e^{-k' t} - k' e^{-k t}) / d``, and each squared term
    integrates to a lower incomplete gamma:

        (1/d^2) [k^2 g(p+1, 2k't0)/(2k')^{p+1} + k'^2 g(p+1, 2k t0)/(2k)^{p+1}
                 - 2 k k' g(p+1, lam t0)/lam^{p+1}]

    Outside the real-``d`` regime this falls back to quadrature.
    """
    if p not in (1, 2):
        raise DomainError("moment order must be 1 or 2")
    if params.t0 == 0:
        return 0.0
    if not params.real_d:
        return nonmarkov_moment_quad(p, params)
    lam, t0 = params.lam, params.t0
    d = params.d.real
    k, kp = (lam + d) / 2, (lam - d) / 2
    a = p + 1
    return (k * k * lower_gamma(a, 2 * kp * t0) / (2 * kp) ** a
            + kp * kp * lower_gamma(a, 2 * k * t0) / (2 * k) ** a
            - 2 * k * kp * lower_gamma(a, lam * t0) / lam**a) / d**2


def nonmarkov_moment_printed(p: int, params: NonMarkovParams) -> float:
    """The simplified moment expressions as published, in terms of gamma0.

    Kept for comparison; they do not equal the integral they summarise
    (see :func:`nonmarkov_moment`).
    """
    g, lam, t0 = params.gamma0, params.lam, params.t0
    e1, _ = decay_first_second(t0)
    if p == 1:
        return e1 * (-g / lam + 0.5 - 2 * lam / g + lam**2 / g**2)
    if p == 2:
        e2 = -t0 * t0 * math.exp(-t0) + 2 * e1
        return e2 * (-g / lam**2 + 5 / (4 * g) - 5 * lam / (2 * g**2) + lam**2 / g**3)
    raise DomainError("moment order must be 1 or 2")

"""Closed-form c-intercept predictors, sensitivities and the shot budget.

c is defined operationally as the windowed-CLT intercept of a series whose
mean is ``p1 = P(read 1)``; for a Bernoulli(p1) series that is
``0.5 * log2((1 - p1) / p1)``. Every predictor below reduces to that
expression with the appropriate ``p1``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .errors import DegenerateError, DomainError
from .model import digest
from .sim import effective_p1_spam

log = logging.getLogger(__name__)

DEGENERATE_EPS = 1e-9


@dataclass(frozen=True)
class CPrediction:
    c: float
    model: str  # coin | spam | t1 | t2 | observable
    inputs_hash: str
    details: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class VarianceBudget:
    mean_h: float
    var_h: float = 0.0
    var_t1: float = 0.0
    var_t2: float = 0.0
    var_gate: float = 0.0
    var_readout: float = 0.0

    def __post_init__(self):
        for name in ("var_h", "var_t1", "var_t2", "var_gate", "var_readout"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be >= 0")

    @property
    def noise_sum(self) -> float:
        return self.var_t1 + self.var_t2 + self.var_gate + self.var_readout

    @property
    def total(self) -> float:
        return self.var_h + self.noise_sum

    def rows(self) -> list[tuple[str, float]]:
        return [("var_h", self.var_h), ("var_t1", self.var_t1), ("var_t2", self.var_t2),
                ("var_gate", self.var_gate), ("var_readout", self.var_readout),
                ("total", self.total)]


def _check_nondegenerate(p1: float, what: str = "p1"):
    if not (DEGENERATE_EPS < p1 < 1 - DEGENERATE_EPS):
        raise DegenerateError(f"{what}={p1} makes the outcome deterministic; c is undefined")


def c_coin(p1: float) -> float:
    """Intercept of a Bernoulli(p1) series: ``0.5 * log2((1 - p1) / p1)``."""
    if not 0 <= p1 <= 1:
        raise DomainError(f"p1 must lie in [0, 1], got {p1}")
    _check_nondegenerate(p1)
    return 0.5 * math.log2((1 - p1) / p1)


def c_spam(p01: float, p10: float) -> float:
    """Fair coin seen through readout confusion ``(p01, p10)``.

    Equals ``0.5 * log2((1 + p10 - p01) / (1 + p01 - p10))``.
    """
    return c_coin(effective_p1_spam(0.5, p01, p10))


def c_spam_table_convention(p01: float, p10: float) -> float:
    """``log2((1 + p10 - p01) / (1 + p01 - p10))``, i.e. ``2 * c_spam``.

    This un-halved form reproduces the 'Expected c' column of the published
    readout table. Reported alongside :func:`c_spam` for comparison only.
    """
    return math.log2((1 + p10 - p01) / (1 + p01 - p10))


def delta_c(p_a: float, p_b: float) -> float:
    """``c_coin(p_b) - c_coin(p_a)``; argument order is the caller's choice."""
    return c_coin(p_b) - c_coin(p_a)


def _c_from_b(b: float, p01: float, p10: float) -> float:
    num = b * (1 - p01) + p10
    den = b * p01 + 1 - p10
    if den <= 0 or num <= 0:
        raise DegenerateError("readout-corrected outcome is deterministic; c is undefined")
    p1 = den / (num + den)
    _check_nondegenerate(p1, "P(read 1)")
    return 0.5 * math.log2(num / den)


def t1_b(t: float, t1: float) -> float:
    """Odds ratio ``P(0)/P(1)`` before readout for the H-wait circuit.

    With the decay probability ``eps_d = 1 - exp(-t/T1)`` this is
    ``(1 + eps_d) / (1 - eps_d)``; it is 1 at t = 0 and diverges as the
    qubit fully relaxes.
    """
    if not t1 > 0 or t < 0:
        raise DomainError(f"need t >= 0 and t1 > 0, got t={t}, t1={t1}")
    s = math.exp(-t / t1)
    if s == 0:
        return math.inf
    return (2 - s) / s


def t2_b(t: float, t2: float) -> float:
    """Odds ratio ``P(0)/P(1)`` before readout for the H-wait-H circuit,
    ``(1 + e) / (1 - e)`` with ``e = exp(-t/T2)``; infinite at t = 0."""
    if not t2 > 0 or t < 0:
        raise DomainError(f"need t >= 0 and t2 > 0, got t={t}, t2={t2}")
    e = math.exp(-t / t2)
    if e == 1:
        return math.inf
    return (1 + e) / (1 - e)


def _c_b_limit(b: float, p01: float, p10: float) -> float:
    if math.isinf(b):
        # only the readout path can produce a 1
        if p01 <= DEGENERATE_EPS:
            raise DegenerateError("deterministic outcome (no readout error, b -> inf)")
        return c_coin(p01)
    return _c_from_b(b, p01, p10)


def c_t1(p01: float, p10: float, t: float, t1: float) -> float:
    return _c_b_limit(t1_b(t, t1), p01, p10)


def c_t2(p01: float, p10: float, t: float, t2: float) -> float:
    return _c_b_limit(t2_b(t, t2), p01, p10)


def dc_dx_unidirectional(x: float, direction: int = 1) -> float:
    """Sensitivity ``2 / (1 - x**2)`` of c to a one-sided readout error x.

    This is the derivative of the natural-log, un-halved form
    ``ln((1 - x)/(1 + x))``; the base-2 halved intercept moves by this
    value times ``1 / (2 ln 2)``. ``direction`` (+1 or -1) sets the sign.
    """
    if not 0 <= x < 1:
        if x == 1:
            raise DegenerateError("sensitivity diverges at x = 1")
        raise DomainError(f"x must lie in [0, 1), got {x}")
    return math.copysign(2.0 / (1.0 - x * x), direction)


def sigma_c_t2(t: float, t2: float, sigma_t2: float) -> float:
    """Uncertainty in the T2 intercept from an uncertainty in T2 (readout
    ignored): ``t e^{t/T2} / (T2^2 (e^{2t/T2} - 1)) * sigma_T2``."""
    if not t2 > 0 or t < 0 or sigma_t2 < 0:
        raise DomainError("need t2 > 0, t >= 0 and sigma_t2 >= 0")
    if t == 0:
        return 0.0
    u = t / t2
    # e^u / (e^{2u} - 1) == 1 / (2 sinh u)
    return t / (t2 * t2 * 2.0 * math.sinh(u)) * sigma_t2


def sigma_c_mean(mean_h: float, sigma_mean_h: float) -> tuple[float, int]:
    """Shift in c from an uncertainty in <H>: returns ``(magnitude, sign)``
    of ``-sigma / <H>``."""
    if mean_h == 0:
        raise DomainError("mean_h must be nonzero")
    v = -sigma_mean_h / mean_h
    return abs(v), (-1 if v < 0 else 1)


def c_observable(budget: VarianceBudget) -> float:
    """``0.5 * log2(total variance / <H>^2)``."""
    if budget.mean_h == 0:
        raise DomainError("mean_h must be nonzero")
    total = budget.total
    if total <= 0:
        raise DegenerateError("total variance is zero; c is undefined")
    return 0.5 * math.log2(total / budget.mean_h**2)


def correct_variance(mean_h: float, c_real: float, noise_sum: float) -> float:
    """Back out Var(H) from a measured intercept: ``<H>^2 2^{2c} - noise``.

    A negative result (estimated noise exceeds the observed variance) is
    clamped to 0 with a logged warning.
    """
    if mean_h == 0:
        raise DomainError("mean_h must be nonzero")
    raw = mean_h**2 * 2.0 ** (2 * c_real) - noise_sum
    if raw < 0:
        log.warning("noise estimate %.4g exceeds observed variance %.4g; Var(H) clamped to 0",
                    noise_sum, raw + noise_sum)
        return 0.0
    return raw


def sigma_at_shots(mean_h: float, c: float, n: float) -> float:
    """Predicted standard deviation of the n-shot mean: ``|mu| 2^{c - log2(n)/2}``."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return abs(mean_h) * 2.0 ** (c - 0.5 * math.log2(n))


@dataclass(frozen=True)
class ShotPlan:
    exact: int  # smallest n meeting the target
    nearest_pow2: int
    conservative: int  # next power of two >= exact
    sigma_exact: float
    sigma_conservative: float


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def shots_for_sigma(mean_h: float, c: float, target_sigma: float) -> ShotPlan:
    """Smallest shot count whose predicted sigma is at most ``target_sigma``,
    plus power-of-two roundings."""
    if target_sigma <= 0:
        raise DomainError("target sigma must be > 0")
    if mean_h == 0:
        raise DomainError("mean_h must be nonzero")
    x = (abs(mean_h) * 2.0**c / target_sigma) ** 2
    n = max(1, math.ceil(x * (1 - 1e-12)))
    nearest = 1 << max(0, round(math.log2(n)))
    cons = _next_pow2(n)
    return ShotPlan(n, nearest, cons, sigma_at_shots(mean_h, c, n), sigma_at_shots(mean_h, c, cons))


def rescale_variance(sigma_sq_n1: float, n1: float, n2: float) -> float:
    """Carry a variance of the mean from n1 to n2 shots (``sigma^2 n`` fixed)."""
    if n1 < 1 or n2 < 1 or sigma_sq_n1 < 0:
        raise DomainError("need n1, n2 >= 1 and a non-negative variance")
    return sigma_sq_n1 * n1 / n2


def predict(model: str, **inputs) -> CPrediction:
    """Dispatch by model name and record intermediate quantities.

    ``coin``: p1. ``spam``: p01, p10. ``t1``: p01, p10, t, t1. ``t2``: p01,
    p10, t, t2. ``observable``: a VarianceBudget as ``budget``.
    """
    details: dict = {}
    if model == "coin":
        c = c_coin(inputs["p1"])
        details["p_read1"] = inputs["p1"]
    elif model == "spam":
        p01, p10 = inputs["p01"], inputs["p10"]
        c = c_spam(p01, p10)
        details["p_read1"] = effective_p1_spam(0.5, p01, p10)
        details["c_table_convention"] = c_spam_table_convention(p01, p10)
    elif model in ("t1", "t2"):
        p01, p10, t, T = inputs["p01"], inputs["p10"], inputs["t"], inputs[model]
        b = t1_b(t, T) if model == "t1" else t2_b(t, T)
        c = (c_t1 if model == "t1" else c_t2)(p01, p10, t, T)
        details.update(b=b, survival=math.exp(-t / T), eps_d=1 - math.exp(-t / T),
                       p_read1=(b * p01 + 1 - p10) / (b + 1) if math.isfinite(b) else p01)
    elif model == "observable":
        budget = inputs["budget"]
        c = c_observable(budget)
        details.update(dict(budget.rows()), mean_h=budget.mean_h)
        inputs = {"budget": budget.__dict__}
    else:
        raise DomainError(f"unknown model {model!r}")
    return CPrediction(c, model, digest(inputs), details)

"""Windowed CLT statistics.

The central statistic is the *c-intercept*. Per-shot outcomes are averaged
over disjoint windows of ``w`` shots; by the CLT the relative standard
deviation (RSD) of the window means falls as ``w**-0.5``, so
``log2(RSD) = -0.5 * log2(w) + c``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DegenerateError, InsufficientDataError

log = logging.getLogger(__name__)

DEFAULT_WINDOWS = (4, 8, 16, 32, 64, 128)
DEFAULT_N_WINDOWS = 256
CLT_SLOPE = -0.5

GREEN, YELLOW, BLACK = "green", "yellow", "black"
RED, ORANGE = "red", "orange"


@dataclass
class RsdCurve:
    points: list[tuple[float, float]]  # (log2 w, log2 rsd), valid points only
    window_sizes: tuple[int, ...]
    n_windows: int
    diagnostics: list[str] = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        return len(self.points) < 2

    def to_csv(self) -> str:
        return "log2_w,log2_rsd\n" + "".join(f"{x!r},{y!r}\n" for x, y in self.points)


@dataclass(frozen=True)
class CFit:
    c: float
    slope: float
    residual_rms: float
    fixed_slope: bool = True
    n_points: int = 0


@dataclass(frozen=True)
class DeltaC:
    c_pred: float
    c_real: float

    @property
    def delta(self) -> float:
        return abs(self.c_pred - self.c_real)


def _values(series) -> np.ndarray:
    return np.asarray(getattr(series, "values", series), dtype=float)


def window_means(series, w: int, n_windows: int) -> np.ndarray:
    """Means of the first ``n_windows`` disjoint windows of ``w`` shots."""
    x = _values(series)
    need = w * n_windows
    if w < 1 or n_windows < 1:
        raise CapacityError(f"window size and count must be >= 1, got w={w}, n={n_windows}")
    if x.size < need:
        raise CapacityError(
            f"series has {x.size} shots; {n_windows} windows of {w} need {need}"
        )
    return x[:need].reshape(n_windows, w).mean(axis=1)


def required_shots(window_sizes=DEFAULT_WINDOWS, n_windows: int = DEFAULT_N_WINDOWS) -> int:
    return max(window_sizes) * n_windows


def rsd_curve(series, window_sizes=DEFAULT_WINDOWS, n_windows: int = DEFAULT_N_WINDOWS) -> RsdCurve:
    """Algorithm-1 curve of ``(log2 w, log2 sigma/|mu|)``.

    sigma is the sample (n-1) standard deviation of the window means. A
    window size whose mean is zero or whose spread vanishes gives no finite
    point; it is left out and reported in ``diagnostics``.
    """
    sizes = tuple(int(w) for w in window_sizes)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"window sizes must be strictly increasing, got {sizes}")
    if any(w < 1 or w & (w - 1) for w in sizes):
        raise ValueError(f"window sizes must be powers of 2, got {sizes}")
    x = _values(series)
    if x.size < required_shots(sizes, n_windows):
        raise CapacityError(
            f"series has {x.size} shots; windows up to {max(sizes)} x {n_windows} "
            f"need {required_shots(sizes, n_windows)}"
        )
    points, diags = [], []
    for w in sizes:
        m = window_means(x, w, n_windows)
        mu = m.mean()
        sigma = m.std(ddof=1)
        if mu == 0:
            diags.append(f"w={w}: mean of window means is zero, RSD undefined")
            continue
        if sigma == 0:
            diags.append(f"w={w}: window means have zero spread, log RSD is -inf")
            continue
        points.append((math.log2(w), math.log2(sigma / abs(mu))))
    for d in diags:
        log.info(d)
    return RsdCurve(points, sizes, n_windows, diags)


def fit_c(curve: RsdCurve, fix_slope: bool = True) -> CFit:
    """Fit ``y = slope * x + c`` to the curve.

    With ``fix_slope`` the slope is pinned at -1/2 and c is the mean of
    ``y + x/2``; otherwise ordinary least squares.
    """
    pts = np.asarray(curve.points, dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        raise InsufficientDataError(
            f"need at least 2 valid RSD points, have {len(pts)}"
            + (f" ({'; '.join(curve.diagnostics)})" if curve.diagnostics else "")
        )
    x, y = pts[:, 0], pts[:, 1]
    if fix_slope:
        slope = CLT_SLOPE
        c = float(np.mean(y - slope * x))
    else:
        slope, c = (float(v) for v in np.polyfit(x, y, 1))
    resid = y - (slope * x + c)
    return CFit(c, slope, float(np.sqrt(np.mean(resid**2))), fix_slope, len(pts))


def measure_c(series, window_sizes=DEFAULT_WINDOWS, n_windows: int = DEFAULT_N_WINDOWS,
              fix_slope: bool = True) -> CFit:
    """``fit_c(rsd_curve(series))``; raises DegenerateError on a flat series."""
    curve = rsd_curve(series, window_sizes, n_windows)
    if curve.degenerate:
        raise DegenerateError("; ".join(curve.diagnostics) or "no valid RSD points")
    return fit_c(curve, fix_slope)


def variance_of_variance(series) -> float:
    x = _values(series)
    n = x.size
    if n < 4:
        raise InsufficientDataError(f"need at least 4 samples, have {n}")
    d = x - x.mean()
    m4 = np.mean(d**4)
    s2 = np.sum(d**2) / (n - 1)
    return float((m4 - (n - 3) / (n - 1) * s2**2) / n)


def classify_delta_c(d) -> str:
    """Colour for a prediction gap: green < 0.5 <= yellow <= 1.0 < black.

    Accepts a :class:`DeltaC` or a bare gap value.
    """
    delta = d.delta if isinstance(d, DeltaC) else abs(float(d))
    if delta < 0.5:
        return GREEN
    if delta <= 1.0:
        return YELLOW
    return BLACK


def sigma_ratio(delta: float) -> float:
    """Factor between predicted and real sigma implied by a gap in c."""
    return 2.0 ** abs(delta)


def classify_tmap(values, x: float) -> str:
    """Colour of ``x`` by its z-score against ``values``.

    Bins: z < -1.5 red, [-1.5, 0) orange, [0, 1.5) yellow, >= 1.5 green.
    A z-score exactly on a boundary goes to the higher bin; the spread is the
    sample (n-1) standard deviation.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise DegenerateError("need at least two values to form a z-score")
    sd = v.std(ddof=1)
    if sd == 0:
        raise DegenerateError("values have zero spread")
    z = (x - v.mean()) / sd
    if z < -1.5:
        return RED
    if z < 0:
        return ORANGE
    if z < 1.5:
        return YELLOW
    return GREEN

"""Shot-count variance prediction for noisy quantum circuits.

The package measures the windowed-CLT c-intercept of outcome series,
predicts it from calibration data, and turns it into a shot budget.
"""

__version__ = "0.1.0"

from .cltstats import CFit, RsdCurve, classify_delta_c, fit_c, measure_c, rsd_curve  # noqa: E402
from .errors import (  # noqa: E402
    CapacityError,
    DegenerateError,
    DomainError,
    InsufficientDataError,
    ParseError,
    ShotvarError,
)
from .model import CircuitSpec, DeviceCalibration, QubitCalibration, WaitKind  # noqa: E402
from .observable import PauliHamiltonian, load_h2_fixture, parse_pauli  # noqa: E402
from .predict import VarianceBudget, c_observable, shots_for_sigma, sigma_at_shots  # noqa: E402
from .sim import OutcomeSeries, run_experiment  # noqa: E402

__all__ = [
    "__version__",
    "CFit", "RsdCurve", "classify_delta_c", "fit_c", "measure_c", "rsd_curve",
    "CapacityError", "DegenerateError", "DomainError", "InsufficientDataError", "ParseError",
    "ShotvarError",
    "CircuitSpec", "DeviceCalibration", "QubitCalibration", "WaitKind",
    "PauliHamiltonian", "load_h2_fixture", "parse_pauli",
    "VarianceBudget", "c_observable", "shots_for_sigma", "sigma_at_shots",
    "OutcomeSeries", "run_experiment",
]

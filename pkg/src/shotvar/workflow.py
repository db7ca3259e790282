"""Observable noise budget and the estimate-then-correct procedure.

1. Guess Var(H) (by default the Popoviciu bound) and add the per-source
   noise variances to predict c.
2. Run a pilot, measure c from its windowed RSD curve, and back out a
   corrected Var(H).
3. Use the corrected budget to predict sigma at any shot count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import cltstats, noisevar, observable, predict, sim
from .rng import derive_seed
from .errors import DomainError
from .model import CircuitSpec, DeviceCalibration
from .noisevar import Aggregate
from .observable import PauliHamiltonian

VAR_METHODS = ("popoviciu", "bhatia-davis", "coeff-sum", "eigenstate", "sampled")


def guess_var_h(H: PauliHamiltonian, method: str = "popoviciu", mean_h: float | None = None,
                n_states: int = 200, seed: int = 0) -> float:
    if method == "popoviciu":
        return observable.popoviciu_bound(observable.spectrum_bounds(H))
    if method == "bhatia-davis":
        if mean_h is None:
            raise DomainError("Bhatia-Davis needs <H>")
        return observable.bhatia_davis_bound(observable.spectrum_bounds(H), mean_h)
    if method == "coeff-sum":
        return observable.coeff_sum_bound(H)
    if method == "eigenstate":
        return 0.0
    if method == "sampled":
        return observable.sampled_variance(H, observable.haar_states(H.n_qubits, n_states, seed))
    raise DomainError(f"unknown variance method {method!r}; choose from {', '.join(VAR_METHODS)}")


def noise_budget(cal: DeviceCalibration, n_qubits: int, depth: float, mean_h: float,
                 var_h: float = 0.0, policy: Aggregate = Aggregate.MEDIAN,
                 gate: bool = True, readout: bool = True) -> predict.VarianceBudget:
    """Per-source variances for ``n_qubits`` run for ``depth`` dt.

    T1/T2 use one representative value (median or minimum over the first
    ``n_qubits`` calibrated qubits) applied to every qubit, i.e.
    ``n * Var(T_i)``. Readout sums the per-qubit bit variance with the
    fractional weighting.
    """
    qubits = cal.qubits[:n_qubits]
    t1, t2 = noisevar.aggregate_times(cal, policy, [q.id for q in qubits])
    var_t1 = n_qubits * noisevar.decay_variance(depth / t1)
    var_t2 = n_qubits * noisevar.decay_variance(depth / t2)
    var_gate = noisevar.gate_walk_variance(depth, cal.eplg, n_qubits) if gate else 0.0
    var_ro = 0.0
    if readout:
        var_ro = sum(noisevar.readout_bit_variance(q.p10, q.p01, i) for i, q in enumerate(qubits))
    return predict.VarianceBudget(mean_h, var_h, var_t1, var_t2, var_gate, var_ro)


@dataclass(frozen=True)
class Estimate:
    mean_h: float
    var_guess: float
    c_guess: float
    c_real: float
    var_corrected: float
    c_corrected: float
    budget: predict.VarianceBudget
    pilot_fit: cltstats.CFit

    def sigma_at(self, shots: int) -> float:
        return predict.sigma_at_shots(self.mean_h, self.c_corrected, shots)

    def sigma_guess_at(self, shots: int) -> float:
        return predict.sigma_at_shots(self.mean_h, self.c_guess, shots)


def estimate_then_correct(H: PauliHamiltonian, cal: DeviceCalibration, spec: CircuitSpec,
                          pilot_shots: int = 2**15, seed: int = 0, mean_h: float | None = None,
                          var_method: str = "popoviciu", policy: Aggregate = Aggregate.MEDIAN,
                          fix_slope: bool = True) -> Estimate:
    """Run the two-step procedure against the simulator.

    ``mean_h`` defaults to the magnitude of the ground energy, standing in for
    a known approximate value of <H>.
    """
    if mean_h is None:
        mean_h = abs(observable.spectrum_bounds(H).lambda_min)
    var_guess = guess_var_h(H, var_method, mean_h)
    budget = noise_budget(cal, spec.n_qubits, spec.depth, mean_h, var_guess, policy)
    c_guess = predict.c_observable(budget)

    pilot = sim.run_experiment(spec, cal, H, shots=pilot_shots, seed=seed)
    fit = cltstats.measure_c(pilot, fix_slope=fix_slope)
    var_corr = predict.correct_variance(mean_h, fit.c, budget.noise_sum)
    corrected = predict.VarianceBudget(mean_h, var_corr, budget.var_t1, budget.var_t2,
                                       budget.var_gate, budget.var_readout)
    return Estimate(mean_h, var_guess, c_guess, fit.c, var_corr,
                    predict.c_observable(corrected), corrected, fit)


def replay_sigma(H: PauliHamiltonian, cal: DeviceCalibration, spec: CircuitSpec, shots: int,
                 replays: int = 100, seed: int = 0) -> float:
    """Empirical standard deviation of the ``shots``-shot mean over
    independent replays (the density matrix is computed once)."""
    rho = sim.ansatz_state(spec, cal, H)
    means = [sim.measure_observable(rho, H, shots, cal, seed=derive_seed(seed, "replay", k)).mean()
             for k in range(replays)]
    return float(np.std(means, ddof=1))

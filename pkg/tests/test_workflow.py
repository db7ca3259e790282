import pytest

from shotvar import noisevar, observable, predict, workflow
from shotvar.errors import DomainError
from shotvar.files import synthetic_calibration
from shotvar.model import CircuitSpec


@pytest.fixture(scope="module")
def h2():
    return observable.load_h2_fixture()


@pytest.fixture(scope="module")
def cal():
    return synthetic_calibration()


def test_guess_methods(h2):
    b = observable.spectrum_bounds(h2)
    assert workflow.guess_var_h(h2) == pytest.approx(observable.popoviciu_bound(b))
    assert workflow.guess_var_h(h2, "bhatia-davis", -1.0) <= workflow.guess_var_h(h2)
    assert workflow.guess_var_h(h2, "coeff-sum") == pytest.approx(2.683)
    assert workflow.guess_var_h(h2, "eigenstate") == 0.0
    assert 0 < workflow.guess_var_h(h2, "sampled") < workflow.guess_var_h(h2)
    with pytest.raises(DomainError):
        workflow.guess_var_h(h2, "bhatia-davis")
    with pytest.raises(DomainError):
        workflow.guess_var_h(h2, "magic")


def test_noise_budget_rows(cal):
    b = workflow.noise_budget(cal, 4, 20.0, 1.84, 0.5)
    t1, t2 = noisevar.aggregate_times(cal, qubits=[0, 1, 2, 3])
    assert b.var_t1 == pytest.approx(4 * noisevar.decay_variance(20 / t1))
    assert b.var_t2 == pytest.approx(4 * noisevar.decay_variance(20 / t2))
    assert b.var_gate == pytest.approx(noisevar.gate_walk_variance(20, cal.eplg, 4))
    ro = sum(noisevar.readout_bit_variance(q.p10, q.p01, i) for i, q in enumerate(cal.qubits[:4]))
    assert b.var_readout == pytest.approx(ro)
    assert b.total == pytest.approx(0.5 + b.noise_sum)
    quiet = workflow.noise_budget(cal, 4, 20.0, 1.84, gate=False, readout=False)
    assert quiet.var_gate == quiet.var_readout == 0.0
    strict = workflow.noise_budget(cal, 4, 20.0, 1.84, policy="minimum")
    assert strict.var_t1 >= b.var_t1


def test_estimate_then_correct(h2, cal):
    spec = CircuitSpec(4, depth=20.0, basis="pauli", ansatz_reps=1)
    est = workflow.estimate_then_correct(h2, cal, spec, seed=3)
    assert est.c_corrected == pytest.approx(est.c_real, abs=1e-9)
    assert est.var_corrected == pytest.approx(
        predict.correct_variance(est.mean_h, est.c_real, est.budget.noise_sum))
    assert est.sigma_at(512) == pytest.approx(est.sigma_at(256) / 2**0.5)
    assert est.mean_h == pytest.approx(abs(observable.spectrum_bounds(h2).lambda_min))


def test_replay_sigma_is_reproducible(h2, cal):
    spec = CircuitSpec(4, depth=20.0, basis="pauli", ansatz_reps=1)
    a = workflow.replay_sigma(h2, cal, spec, 64, replays=10, seed=1)
    assert a == workflow.replay_sigma(h2, cal, spec, 64, replays=10, seed=1)
    assert a != workflow.replay_sigma(h2, cal, spec, 64, replays=10, seed=2)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qst4.estimator import (
    DegenerateParametersError,
    DensityMatrix4,
    FitOptions,
    density_from_params,
    initial_points,
    objective,
    objective_gradient,
    predicted_probability,
    reconstruct,
)
from qst4.frames import mub_frame, vinzant_frame
from qst4.metrics import fidelity_pure
from qst4.states import GRID_PRESETS, grid_sample, phase_entangled

from . import oracles
from .conftest import cholesky_params

e = np.eye(4)
PHI_PLUS = np.array([1, 0, 0, 1]) / np.sqrt(2)


def test_identity_params_give_maximally_mixed():
    assert np.allclose(density_from_params([1, 1, 1, 1] + [0] * 12).mat, np.eye(4) / 4, atol=1e-16)


def test_single_param_gives_rank_one():
    assert np.allclose(density_from_params([1] + [0] * 15).mat, np.diag([1, 0, 0, 0]))


def test_zero_params_rejected():
    with pytest.raises(DegenerateParametersError):
        density_from_params(np.zeros(16))
    with pytest.raises(DegenerateParametersError):
        objective(np.zeros(16), mub_frame(), np.zeros(20))


@given(cholesky_params)
def test_density_matches_oracle_layout(t):
    assert np.allclose(density_from_params(t).mat, oracles.density(t), atol=1e-14)


def test_density_physical_random(rng):
    for _ in range(1000):
        rho = density_from_params(rng.uniform(-1, 1, 16))
        rho.check()
        assert abs(np.trace(rho.mat) - 1) < 1e-12
        assert np.linalg.eigvalsh(rho.mat).min() >= -1e-12


@given(cholesky_params, st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3))
def test_scale_gauge(t, c):
    assert np.allclose(density_from_params(c * t).mat, density_from_params(t).mat, atol=1e-12)


@pytest.mark.parametrize(
    "rho, xi, expected",
    [
        (np.diag([1.0, 0, 0, 0]), e[0], 1.0),
        (np.eye(4) / 4, np.array([0.5, 0.5j, -0.5, 0.5]), 0.25),
        (np.outer(PHI_PLUS, PHI_PLUS), e[0], 0.5),
    ],
)
def test_predicted_probability(rho, xi, expected):
    assert predicted_probability(xi, DensityMatrix4(rho)) == pytest.approx(expected, abs=1e-12)


def test_objective_perfect_fit(rng, frame):
    t = rng.uniform(-1, 1, 16)
    rho = density_from_params(t)
    measured = [predicted_probability(xi, rho) for xi in frame]
    assert objective(t, frame, measured) < 1e-28
    assert np.linalg.norm(objective_gradient(t, frame, measured)) < 1e-10


def test_objective_constant_predictions(mub):
    assert objective([1, 1, 1, 1] + [0] * 12, mub, np.zeros(20)) == pytest.approx(1.25, abs=1e-14)


def test_objective_length_mismatch(mub):
    with pytest.raises(ValueError):
        objective(np.ones(16), mub, np.zeros(11))
    with pytest.raises(ValueError):
        reconstruct(mub, np.zeros(11))


@settings(max_examples=200)
@given(cholesky_params, st.lists(st.floats(0, 1), min_size=11, max_size=11))
def test_objective_matches_oracle(t, measured):
    frame = vinzant_frame()
    expected = oracles.ls_objective(t, frame.vectors, np.array(measured))
    assert objective(t, frame, measured) == pytest.approx(expected, rel=1e-12, abs=1e-14)
    assert objective(t, frame, measured) >= 0


def test_gradient_matches_finite_differences(rng, frame):
    for _ in range(20):
        t = rng.uniform(-1, 1, 16)
        measured = rng.uniform(0, 1, len(frame))
        fd = oracles.fd_gradient(t, frame.vectors, measured)
        g = objective_gradient(t, frame, measured)
        assert np.linalg.norm(g - fd) / np.linalg.norm(fd) < 1e-6


@given(cholesky_params, st.lists(st.floats(0, 1), min_size=20, max_size=20))
def test_gradient_orthogonal_to_params(t, measured):
    g = objective_gradient(t, mub_frame(), measured)
    assert abs(g @ t) < 1e-8


def test_initial_points_avoid_origin(rng):
    t = initial_points(500, rng)
    assert t.shape == (500, 16)
    assert np.all(np.abs(t) <= 1)
    assert np.all(np.sum(t * t, axis=1) >= 1e-12)


@pytest.mark.parametrize(
    "make, psi",
    [(mub_frame, e[0]), (vinzant_frame, PHI_PLUS), (mub_frame, PHI_PLUS), (vinzant_frame, e[0])],
)
def test_noiseless_reconstruction(make, psi):
    frame = make()
    measured = np.abs(frame.vectors.conj() @ psi) ** 2
    res = reconstruct(frame, measured, FitOptions(seed=3))
    assert res.converged
    assert res.restarts_used == 10
    assert fidelity_pure(psi, res.rho) >= 0.999
    res.rho.check()


def test_noiseless_grid_states(frame):
    states = grid_sample(GRID_PRESETS["tiny"])[::3]
    for k, s in enumerate(states):
        res = reconstruct(frame, frame.intensities(s), FitOptions(seed=k))
        assert fidelity_pure(s, res.rho) >= 0.999


def test_zero_data_handled(mub):
    res = reconstruct(mub, np.zeros(20))
    assert res.converged
    assert 0 <= res.residual <= 1.25 + 1e-12
    res.rho.check()


def test_reconstruct_deterministic(vinzant, rng):
    measured = rng.uniform(0, 0.5, 11)
    a = reconstruct(vinzant, measured, FitOptions(seed=42))
    b = reconstruct(vinzant, measured, FitOptions(seed=42))
    assert np.array_equal(a.rho.mat, b.rho.mat)
    assert a.residual == b.residual and a.best_restart == b.best_restart


def test_more_restarts_never_worse(vinzant, rng):
    measured = rng.uniform(0, 0.5, 11)
    few = reconstruct(vinzant, measured, FitOptions(restarts=3, seed=1))
    many = reconstruct(vinzant, measured, FitOptions(restarts=30, seed=1))
    # same seed: the first three starts coincide
    assert many.residual <= few.residual + 1e-15


def test_iteration_cap_reports_not_converged(vinzant, rng):
    measured = rng.uniform(0, 0.5, 11)
    res = reconstruct(vinzant, measured, FitOptions(restarts=2, max_iters=1, seed=0))
    assert not res.converged
    assert res.iterations == 1
    res.rho.check()


@pytest.mark.parametrize("kw", [dict(restarts=0), dict(max_iters=0), dict(grad_tol=0)])
def test_bad_options(kw):
    with pytest.raises(ValueError):
        FitOptions(**kw)


def test_noisy_fit_beats_truth(rng, frame):
    from qst4.noise import RngStream, noisy_measurements

    psi = phase_entangled(1.0)
    measured = noisy_measurements(frame.vectors, psi, 0.3, RngStream(8, 0))
    res = reconstruct(frame, measured)
    truth = np.sum((frame.intensities(psi) - measured) ** 2)
    assert res.residual <= truth
    res.rho.check()

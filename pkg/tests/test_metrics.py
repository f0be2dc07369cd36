import numpy as np
import pytest
from hypothesis import given, settings

from qst4.estimator import density_from_params
from qst4.metrics import (
    concurrence,
    concurrence_from_product,
    evaluate,
    fidelity_full,
    fidelity_pure,
    purity,
    r_matrix,
    spin_flip,
)
from qst4.qmath import herm_eig

from . import oracles
from .conftest import cholesky_params, random_density, unit_vec4

e = np.eye(4)
PHI_PLUS = np.array([1, 0, 0, 1]) / np.sqrt(2)
P_PLUS = np.outer(PHI_PLUS, PHI_PLUS)


def werner(p):
    return p * P_PLUS + (1 - p) * np.eye(4) / 4


def test_fidelity_examples():
    psi = np.array([0.5, 0.5j, -0.5, 0.5])
    assert fidelity_pure(psi, np.outer(psi, psi.conj())) == pytest.approx(1, abs=1e-15)
    assert fidelity_pure(e[0], np.outer(e[1], e[1])) == 0
    assert fidelity_pure(psi, np.eye(4) / 4) == pytest.approx(0.25)


@settings(max_examples=200)
@given(unit_vec4, cholesky_params)
def test_fidelity_shortcut_matches_uhlmann(psi, t):
    rho = density_from_params(t)
    assert abs(fidelity_pure(psi, rho) - fidelity_full(psi, rho)) < 1e-9


def test_purity_examples():
    assert purity(P_PLUS) == pytest.approx(1)
    assert purity(np.eye(4) / 4) == pytest.approx(0.25)
    assert purity(np.diag([0.5, 0, 0, 0.5])) == pytest.approx(0.5)


@given(cholesky_params)
def test_purity_bounds_and_pure_iff_fidelity_one(t):
    rho = density_from_params(t)
    gamma = purity(rho)
    assert 0.25 <= gamma <= 1
    assert gamma == pytest.approx(np.trace(rho.mat @ rho.mat).real, abs=1e-12)
    top = herm_eig(rho.mat)[1][:, 0]
    if abs(gamma - 1) < 1e-9:
        assert fidelity_pure(top, rho) > 1 - 1e-9


def test_purity_one_iff_top_fidelity_one():
    rho = density_from_params([0, 0, 0, 1, 0, 0, 0, 0, 0.3, -0.2, 0, 0, 0.1, 0, 0.5, 0.4])
    assert purity(rho) == pytest.approx(1, abs=1e-12)
    assert fidelity_pure(herm_eig(rho.mat)[1][:, 0], rho) == pytest.approx(1, abs=1e-12)
    mixed = density_from_params(np.arange(1, 17) / 16)
    assert purity(mixed) < 1 - 1e-3
    assert fidelity_pure(herm_eig(mixed.mat)[1][:, 0], mixed) < 1 - 1e-3


@pytest.mark.parametrize(
    "rho, expected",
    [
        (P_PLUS, P_PLUS),
        (np.diag([1.0, 0, 0, 0]), np.diag([0, 0, 0, 1.0])),
        (np.eye(4) / 4, np.eye(4) / 4),
    ],
)
def test_spin_flip_examples(rho, expected):
    assert np.allclose(spin_flip(rho), expected, atol=1e-15)


@given(cholesky_params)
def test_spin_flip_is_a_state(t):
    flipped = spin_flip(density_from_params(t))
    assert np.allclose(flipped, flipped.conj().T, atol=1e-14)
    assert np.trace(flipped).real == pytest.approx(1)
    assert np.linalg.eigvalsh(flipped).min() > -1e-12


def test_concurrence_examples():
    assert concurrence(P_PLUS) == pytest.approx(1, abs=1e-9)
    assert concurrence(np.diag([1.0, 0, 0, 0])) == 0
    assert concurrence(werner(0.5)) == pytest.approx(0.25, abs=1e-12)


@pytest.mark.parametrize("p", [0, 1 / 3, 0.5, 0.8, 1])
def test_werner_closed_form(p):
    expected = oracles.concurrence_closed_form_werner(p)
    assert abs(concurrence(werner(p)) - expected) < 1e-8
    assert abs(concurrence_from_product(werner(p)) - expected) < 1e-8


def test_concurrence_routes_agree(rng):
    for rank in (1, 2, 3, 4):
        for _ in range(100):
            rho = random_density(rng, rank)
            assert abs(concurrence(rho) - concurrence_from_product(rho)) < 1e-8


def test_concurrence_high_precision_reference(rng):
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 40
    flip = mp.matrix(np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]]).tolist())
    for rank in (1, 2, 4):
        for _ in range(5):
            rho = random_density(rng, rank)
            m = mp.matrix(rho.tolist())
            conj = mp.matrix([[mp.conj(m[i, j]) for j in range(4)] for i in range(4)])
            ev = mp.eig(m * flip * conj * flip)[0]
            a = sorted((mp.sqrt(max(mp.re(x), 0)) for x in ev), reverse=True)
            expected = float(max(0, a[0] - a[1] - a[2] - a[3]))
            assert abs(concurrence(rho) - expected) < 1e-12


def test_r_matrix_eigenvalues_are_sqrt_of_product_spectrum(rng):
    rho = random_density(rng)
    alpha = herm_eig(r_matrix(rho))[0]
    ev = np.sort(np.linalg.eigvals(rho @ spin_flip(rho)).real)[::-1]
    assert np.allclose(alpha**2, ev, atol=1e-12)


def test_product_states_have_zero_concurrence(rng):
    for _ in range(50):
        a, b = random_density(rng)[:2, :2], random_density(rng)[:2, :2]
        a, b = a / np.trace(a), b / np.trace(b)
        assert concurrence(np.kron(a, b)) < 1e-7


def test_evaluate():
    rec = evaluate(PHI_PLUS, P_PLUS)
    assert rec.fidelity == pytest.approx(1)
    assert rec.purity == pytest.approx(1)
    assert rec.concurrence == pytest.approx(1, abs=1e-9)


def test_out_of_range_metric_rejected():
    with pytest.raises(ValueError):
        fidelity_pure(e[0], 2 * np.diag([1.0, 0, 0, 0]))

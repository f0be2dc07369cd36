"""Least-squares density-matrix reconstruction over the 16-parameter Cholesky form.

With ``T`` lower triangular and linear in the real parameters ``t``,
``Tr(T^H T) = |t|^2`` and every predicted probability is a Rayleigh quotient

    <xi|rho|xi> = |T xi|^2 / |t|^2 = t^T Q t / t^T t,    Q = Re(G^H G),

where column ``j`` of ``G`` is ``B_j xi`` for the fixed basis matrix ``B_j``
multiplying ``t_j`` in ``T``. The estimator works with the stacked ``Q``
matrices of a frame, so objective, gradient and Jacobian reduce to small matrix products.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .frames import Frame
from .qmath import HERMITIAN_TOL, PSD_TOL, dagger, herm_eig

N_PARAMS = 16
MIN_NORM_SQ = 1e-12

# (row, col, coefficient) for t_1 .. t_16
_T_LAYOUT = [
    (0, 0, 1), (1, 1, 1), (2, 2, 1), (3, 3, 1),
    (1, 0, 1), (1, 0, 1j),
    (2, 1, 1), (2, 1, 1j),
    (3, 2, 1), (3, 2, 1j),
    (2, 0, 1), (2, 0, 1j),
    (3, 1, 1), (3, 1, 1j),
    (3, 0, 1), (3, 0, 1j),
]


class DegenerateParametersError(ValueError):
    pass


def _basis() -> np.ndarray:
    b = np.zeros((N_PARAMS, 4, 4), dtype=complex)
    for j, (r, c, coef) in enumerate(_T_LAYOUT):
        b[j, r, c] = coef
    return b


T_BASIS = _basis()


def cholesky_factor(t) -> np.ndarray:
    """The lower-triangular ``T`` for parameters ``t_1 .. t_16``."""
    t = np.asarray(t, dtype=float)
    if t.shape != (N_PARAMS,):
        raise ValueError(f"expected {N_PARAMS} parameters, got shape {t.shape}")
    return np.tensordot(t, T_BASIS, axes=1)


@dataclass(frozen=True, eq=False)
class DensityMatrix4:
    """4x4 Hermitian, positive semi-definite, unit-trace matrix."""

    mat: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=complex)
        if m.shape != (4, 4) or not np.all(np.isfinite(m)):
            raise ValueError("density matrix must be a finite 4x4 array")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    def check(self, tol: float = HERMITIAN_TOL) -> None:
        """Raise ``ValueError`` unless the matrix is a physical state within ``tol``."""
        if np.max(np.abs(self.mat - dagger(self.mat))) > tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(self.mat) - 1.0) > tol:
            raise ValueError(f"density matrix trace is {np.trace(self.mat)!r}")
        if herm_eig(self.mat)[0][-1] < -PSD_TOL:
            raise ValueError("density matrix is not positive semi-definite")

    @classmethod
    def from_pure(cls, vec) -> "DensityMatrix4":
        v = np.asarray(getattr(vec, "vec", vec), dtype=complex)
        return cls(np.outer(v, v.conj()))


def density_from_params(t) -> DensityMatrix4:
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("parameters must be finite")
    if not np.any(t):
        raise DegenerateParametersError("degenerate parametrization: all parameters are zero")
    tm = cholesky_factor(t)
    a = dagger(tm) @ tm
    return DensityMatrix4(a / np.trace(a).real)


def predicted_probability(frame_vector, rho: DensityMatrix4) -> float:
    xi = np.asarray(frame_vector, dtype=complex)
    m = rho.mat if isinstance(rho, DensityMatrix4) else np.asarray(rho, dtype=complex)
    return float(np.vdot(xi, m @ xi).real)


@lru_cache(maxsize=32)
def _quadratic_forms_cached(key: bytes, n: int) -> np.ndarray:
    vectors = np.frombuffer(key, dtype=complex).reshape(n, 4)
    g = np.einsum("jab,kb->kaj", T_BASIS, vectors)  # (K, 4, 16)
    q = np.einsum("kaj,kai->kji", g.conj(), g).real
    q = 0.5 * (q + np.swapaxes(q, 1, 2))
    q.setflags(write=False)
    return q


def quadratic_forms(frame: Frame | np.ndarray) -> np.ndarray:
    """Stacked ``(K, 16, 16)`` real symmetric matrices ``Q_k`` of a frame."""
    vectors = np.ascontiguousarray(getattr(frame, "vectors", frame), dtype=complex)
    return _quadratic_forms_cached(vectors.tobytes(), len(vectors))


def _check_measured(frame, measured) -> np.ndarray:
    measured = np.asarray(measured, dtype=float)
    n = len(getattr(frame, "vectors", frame))
    if measured.shape != (n,):
        raise ValueError(f"measured has {measured.size} values, frame has {n} vectors")
    return measured


def _check_params(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.shape != (N_PARAMS,):
        raise ValueError(f"expected {N_PARAMS} parameters, got shape {t.shape}")
    if not np.any(t):
        raise DegenerateParametersError("degenerate parametrization: all parameters are zero")
    return t


def _predict(q: np.ndarray, t: np.ndarray):
    # t: (B, 16) -> predictions (B, K), Jacobians (B, K, 16)
    nk = len(q)
    s = np.sum(t * t, axis=1)
    qt = (t @ q.reshape(nk * N_PARAMS, N_PARAMS).T).reshape(len(t), nk, N_PARAMS)
    p = np.sum(qt * t[:, None, :], axis=2) / s[:, None]
    jac = 2.0 * (qt - p[..., None] * t[:, None, :]) / s[:, None, None]
    return p, jac


def objective(t, frame: Frame, measured) -> float:
    """Sum of squared differences between predicted and measured probabilities."""
    t = _check_params(t)
    measured = _check_measured(frame, measured)
    p, _ = _predict(quadratic_forms(frame), t[None])
    return float(np.sum((p[0] - measured) ** 2))


def objective_gradient(t, frame: Frame, measured) -> np.ndarray:
    t = _check_params(t)
    measured = _check_measured(frame, measured)
    p, jac = _predict(quadratic_forms(frame), t[None])
    return 2.0 * jac[0].T @ (p[0] - measured)


@dataclass(frozen=True)
class FitOptions:
    restarts: int = 10
    max_iters: int = 2000
    grad_tol: float = 1e-8
    ftol: float = 1e-14
    seed: object = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.grad_tol > 0 or not self.ftol >= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class FitResult:
    rho: DensityMatrix4
    params: np.ndarray
    residual: float
    iterations: int
    restarts_used: int
    converged: bool
    best_restart: int = 0


def initial_points(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` starting vectors, i.i.d. uniform on [-1, 1]^16, none near the origin."""
    t = rng.uniform(-1.0, 1.0, (n, N_PARAMS))
    for i in range(n):
        while t[i] @ t[i] < MIN_NORM_SQ:
            t[i] = rng.uniform(-1.0, 1.0, N_PARAMS)
    return t


def _curvature(q, t, p, jac, r):
    # sum_k r_k * Hessian(p_k), Hessian(p_k) = (2/s)(Q_k - p_k I - t grad_k^T - grad_k t^T)
    s = np.sum(t * t, axis=1)
    qr = (r @ q.reshape(len(q), -1)).reshape(len(t), N_PARAMS, N_PARAMS)
    rp = np.sum(r * p, axis=1)
    g = np.matmul(r[:, None, :], jac)[:, 0]
    cross = t[:, :, None] * g[:, None, :]
    out = qr - rp[:, None, None] * np.eye(N_PARAMS) - cross - np.swapaxes(cross, 1, 2)
    return 2.0 * out / s[:, None, None]


def levenberg_marquardt(q, measured, t0, max_iters=2000, grad_tol=1e-8, ftol=1e-14):
    """Damped Newton iteration over independent starting points ``t0`` (B, 16).

    The step solves ``(J^T J + S + lam I) d = -J^T r`` where ``S`` is the
    residual-weighted second-order term; the damping ``lam`` is adapted with
    the usual gain-ratio rule. Without ``S`` this is plain Levenberg-Marquardt,
    which crawls when the optimum is a rank-deficient density matrix with a
    non-zero residual, the typical situation for noisy data.

    Parameters are rescaled to unit norm after every accepted step; the model
    is scale invariant, and the gradient tolerance then has a fixed meaning.
    Returns ``(t, f, iterations, converged)`` arrays over the batch.
    """
    t = t0 / np.linalg.norm(t0, axis=1, keepdims=True)
    nb = len(t)
    p, jac = _predict(q, t)
    r = p - measured
    f = np.sum(r * r, axis=1)
    lam = np.full(nb, 1e-3)
    nu = np.full(nb, 2.0)
    iters = np.zeros(nb, dtype=int)
    converged = np.zeros(nb, dtype=bool)
    active = np.ones(nb, dtype=bool)
    eye = np.eye(N_PARAMS)
    while True:
        g = np.matmul(r[:, None, :], jac)[:, 0]  # half the gradient
        small = 2.0 * np.linalg.norm(g, axis=1) < grad_tol
        converged |= active & small
        active &= ~small & (iters < max_iters)
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        ja, ra, ga, ta = jac[idx], r[idx], g[idx], t[idx]
        h = np.matmul(np.swapaxes(ja, 1, 2), ja) + _curvature(q, ta, p[idx], ja, ra)
        step = np.linalg.solve(h + lam[idx, None, None] * eye, -ga[..., None])[..., 0]
        t_new = ta + step
        t_new /= np.linalg.norm(t_new, axis=1, keepdims=True)
        p_new, jac_new = _predict(q, t_new)
        r_new = p_new - measured
        f_new = np.sum(r_new * r_new, axis=1)
        decrease = f[idx] - f_new
        predicted = np.sum(step * (lam[idx, None] * step - ga), axis=1)
        iters[idx] += 1

        ok = (decrease > 0) & (predicted > 0)
        acc, rej = idx[ok], idx[~ok]
        if acc.size:
            gain = decrease[ok] / predicted[ok]
            lam[acc] *= np.maximum(1.0 / 3.0, 1.0 - (2.0 * gain - 1.0) ** 3)
            nu[acc] = 2.0
            t[acc], p[acc], jac[acc], r[acc], f[acc] = (
                t_new[ok], p_new[ok], jac_new[ok], r_new[ok], f_new[ok]
            )
            flat = decrease[ok] < ftol
            converged[acc[flat]] = True
            active[acc[flat]] = False
        if rej.size:
            lam[rej] *= nu[rej]
            nu[rej] *= 2.0
            # damping saturated: no representable step lowers f any more
            stuck = rej[lam[rej] > 1e16]
            converged[stuck] = True
            active[stuck] = False
    return t, f, iters, converged


def reconstruct(frame: Frame, measured, options: FitOptions | None = None) -> FitResult:
    """Best least-squares density matrix for ``measured`` over several random starts.

    Never raises on optimizer trouble: if no restart meets the convergence
    criteria the best point found is returned with ``converged=False``.
    """
    options = options or FitOptions()
    measured = _check_measured(frame, measured)
    rng = np.random.default_rng(options.seed)
    t0 = initial_points(options.restarts, rng)
    t, f, iters, conv = levenberg_marquardt(
        quadratic_forms(frame), measured, t0, options.max_iters, options.grad_tol, options.ftol
    )
    # argmin picks the lowest index among equal residuals
    best = int(np.argmin(f))
    return FitResult(
        rho=density_from_params(t[best]),
        params=t[best].copy(),
        residual=float(f[best]),
        iterations=int(iters[best]),
        restarts_used=options.restarts,
        converged=bool(conv[best]),
        best_restart=best,
    )

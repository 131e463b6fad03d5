"""Proximal maps for the functions used by the bundled problems.

Every map solves

    prox_{lam g}(u) = argmin_v  lam * g(v) + 0.5 * ||u - v||^2

exactly (closed form, one linear solve, or a finite active-set search).
:class:`ProxOperator` wraps a map together with a tag, so solvers can call
``prox(u, lam)`` without caring which ``g`` is behind it.
"""

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .numerics import NotPositiveDefiniteError, as_vector

__all__ = [
    "ProjectionError",
    "ProxOperator",
    "prox_box",
    "project_affine_box",
    "prox_quadratic_form",
    "prox_sumsq_box",
    "prox_inequality_holds",
    "box_prox",
    "affine_box_projection",
    "quadratic_form_prox",
    "sumsq_box_prox",
    "MAX_AFFINE_ROWS",
]

MAX_AFFINE_ROWS = 8


class ProjectionError(RuntimeError):
    """No active set passed the KKT test (infeasible or degenerate input)."""


@dataclass(frozen=True)
class ProxOperator:
    """A proximal map ``(u, lam) -> prox_{lam g}(u)`` with a descriptive tag."""

    fn: Callable[[np.ndarray, float], np.ndarray]
    tag: str
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, u, lam):
        return self.fn(u, lam)


def _check_bounds(lo, hi):
    if np.any(lo > hi):
        raise ValueError("lower bound exceeds upper bound")


def prox_box(u, lo, hi):
    """Projection onto the box ``[lo, hi]`` (prox of its indicator, any lam)."""
    u = as_vector(u, "u")
    lo = np.broadcast_to(np.asarray(lo, dtype=np.float64), u.shape)
    hi = np.broadcast_to(np.asarray(hi, dtype=np.float64), u.shape)
    _check_bounds(lo, hi)
    return np.minimum(np.maximum(u, lo), hi)


def prox_sumsq_box(u, lo, hi, lam):
    """Prox of ``sum(v_i**2)`` restricted to the cube ``[lo, hi]^n``.

    Each coordinate is a one-dimensional convex quadratic, so the constrained
    minimiser is the unconstrained one, ``u_i / (1 + 2 lam)``, clamped.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    if lam <= 0:
        raise ValueError("lam must be positive")
    u = as_vector(u, "u")
    return np.clip(u / (1.0 + 2.0 * lam), lo, hi)


def prox_quadratic_form(u, B, lam):
    """Prox of ``g(x) = x^T B x`` for symmetric PSD ``B``: solve ``(I + 2 lam B) v = u``."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    u = as_vector(u, "u")
    B = np.asarray(B, dtype=np.float64)
    A = np.eye(u.shape[0]) + 2.0 * lam * B
    try:
        factor = scipy.linalg.cho_factor(A, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    return scipy.linalg.cho_solve(factor, u)


def project_affine_box(u, M, d, lo, hi, tol=1e-9):
    """Euclidean projection onto ``{x : lo <= M x + d <= hi}``.

    Each of the ``m`` rows is either at its lower bound, inactive, or at its
    upper bound. All ``3**m`` patterns are tried; for each, the equality
    constrained problem ``min 0.5||x - u||^2  s.t.  A x = c`` is solved in
    closed form, ``x = u + A^T eta`` with ``A A^T eta = c - A u``. A pattern
    is accepted when ``x`` is feasible and ``eta >= 0`` on lower-active rows,
    ``eta <= 0`` on upper-active rows.

    Among accepted candidates the one with the smallest objective wins, ties
    going to the lexicographically smallest pattern code (0 = lower,
    1 = inactive, 2 = upper).

    Raises
    ------
    ValueError
        If ``m`` exceeds ``MAX_AFFINE_ROWS`` or the bounds are inverted.
    ProjectionError
        If no pattern passes (empty feasible set or numerical degeneracy).
    """
    u = as_vector(u, "u")
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    d = np.asarray(d, dtype=np.float64).reshape(-1)
    m, n = M.shape
    if n != u.shape[0] or d.shape[0] != m:
        raise ValueError("dimension mismatch between u, M and d")
    if m > MAX_AFFINE_ROWS:
        raise ValueError(f"{m} rows exceeds the enumeration limit {MAX_AFFINE_ROWS}")
    lo = np.broadcast_to(np.asarray(lo, dtype=np.float64), (m,))
    hi = np.broadcast_to(np.asarray(hi, dtype=np.float64), (m,))
    _check_bounds(lo, hi)

    scale = 1.0 + np.abs(u).max() + np.abs(d).max() + np.abs(hi - lo).max()
    feas_tol = tol * scale

    # fast path: u already feasible
    p = M @ u + d
    if np.all(p >= lo - feas_tol) and np.all(p <= hi + feas_tol):
        return u.copy()

    best = None
    best_obj = np.inf
    for code in itertools.product((0, 1, 2), repeat=m):
        active = [i for i, c in enumerate(code) if c != 1]
        if not active:
            continue
        A = M[active]
        c = np.where(np.array([code[i] for i in active]) == 0, lo[active], hi[active]) - d[active]
        gram = A @ A.T
        rhs = c - A @ u
        eta, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
        x = u + A.T @ eta
        if np.linalg.norm(A @ x - c) > feas_tol:
            continue
        p = M @ x + d
        if np.any(p < lo - feas_tol) or np.any(p > hi + feas_tol):
            continue
        signs = np.array([code[i] for i in active])
        if np.any(eta[signs == 0] < -tol * scale) or np.any(eta[signs == 2] > tol * scale):
            continue
        obj = 0.5 * float((x - u) @ (x - u))
        if best is None or obj < best_obj - 1e-15 * max(1.0, best_obj):
            best, best_obj = x, obj
    if best is None:
        raise ProjectionError("no active set satisfies the KKT conditions")
    return best


def prox_inequality_holds(prox, g, u, v, lam, tol=1e-9):
    """Check ``lam (g(v) - g(p)) >= <u - p, v - p>`` with ``p = prox(u, lam)``.

    This is the variational characterisation of the prox point and holds for
    every ``v`` in the domain of a convex ``g``. Returns ``True`` when the
    inequality is met up to ``-tol``.
    """
    u = as_vector(u, "u")
    v = as_vector(v, "v")
    p = prox(u, lam)
    lhs = lam * (g(v) - g(p))
    rhs = float((u - p) @ (v - p))
    return bool(lhs - rhs >= -tol)


# ---------------------------------------------------------------------------
# ProxOperator factories

def box_prox(lo, hi):
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    return ProxOperator(lambda u, lam: prox_box(u, lo, hi), "box",
                        {"lo": lo, "hi": hi})


def sumsq_box_prox(lo, hi):
    return ProxOperator(lambda u, lam: prox_sumsq_box(u, lo, hi, lam), "sumsq_box",
                        {"lo": lo, "hi": hi})


def affine_box_projection(M, d, lo, hi):
    M = np.asarray(M, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    return ProxOperator(lambda u, lam: project_affine_box(u, M, d, lo, hi),
                        "affine_box", {"M": M, "d": d, "lo": lo, "hi": hi})


class _QuadraticFormProx:
    """Prox of ``x^T B x`` with the Cholesky factor cached for the last lam.

    The solvers change lam rarely, so one factorization usually serves many
    iterations.
    """

    def __init__(self, B):
        self.B = np.asarray(B, dtype=np.float64)
        self._cache = (None, None)

    def __call__(self, u, lam):
        if lam <= 0:
            raise ValueError("lam must be positive")
        cached_lam, factor = self._cache  # single read; safe under concurrent calls
        if lam != cached_lam:
            A = np.eye(self.B.shape[0]) + 2.0 * lam * self.B
            try:
                factor = scipy.linalg.cho_factor(A, lower=True)
            except np.linalg.LinAlgError as exc:
                raise NotPositiveDefiniteError(str(exc)) from exc
            self._cache = (lam, factor)
        return scipy.linalg.cho_solve(factor, np.asarray(u, dtype=np.float64))


def quadratic_form_prox(B):
    return ProxOperator(_QuadraticFormProx(B), "quadratic_form", {"B": np.asarray(B)})

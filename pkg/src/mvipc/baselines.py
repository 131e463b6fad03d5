"""Comparison methods, adapted to mixed variational inequalities.

The two proximal point schemes (Kim's accelerated method and Maingé's
relaxed inertial method) are stated for monotone inclusions through the
resolvent ``J_lam``. Here ``J_lam`` is replaced by the forward-prox map

    F_lam(u) = prox_{lam g}(u - lam T u),

whose fixed points are exactly the solutions of the inequality. The two
projection-contraction schemes use the prox in place of the projection.

Every runner returns a :class:`~mvipc.solver.RunResult` whose trace has the
same fields as the main solver, so iteration counts compare one to one.
"""

import time

import numpy as np

from .numerics import as_vector
from .solver import D_ZERO_SQ, IterRecord, RunResult

__all__ = [
    "BASELINES",
    "dong_alpha",
    "mainge_coefficients",
    "run_pcm_he",
    "run_pcm_dong",
    "run_ppa_kim",
    "run_ppa_mainge",
]

DONG_GAMMA = 58 / 477


class _Trace:
    """Accumulates records and applies the ``||x_{n+1} - x_n|| < eps`` rule."""

    def __init__(self, prob, eps):
        if eps <= 0:
            raise ValueError("eps must be positive")
        self.prob = prob
        self.eps = eps
        self.records = []
        self.start = time.perf_counter_ns()

    def add(self, x_old, x_new, lam, res):
        sol = self.prob.solution
        tol = float(np.linalg.norm(x_new - x_old))
        self.records.append(IterRecord(
            n=len(self.records), tol=tol, lam=lam, res_wy=res,
            dist_sol=None if sol is None else float(np.linalg.norm(x_new - sol)),
            elapsed_ns=time.perf_counter_ns() - self.start,
        ))
        return tol < self.eps

    def result(self, method, x, converged, params):
        return RunResult(method, x, converged, self.records, False, params)


def _pcm_step(prob, w, lam, gamma, mu=None):
    """One projection-contraction step from ``w``; returns ``(x_next, lam_next, ||w - y||)``."""
    Tw = prob.T(w)
    y = prob.prox(w - lam * Tw, lam)
    Ty = prob.T(y)
    d = (w - y) - lam * (Tw - Ty)
    dd = float(d @ d)
    tau = 0.0 if dd < D_ZERO_SQ else float((w - y) @ d) / dd
    x_next = w - gamma * tau * d
    lam_next = lam
    if mu is not None and np.any(Tw != Ty):
        lam_next = min(mu * np.linalg.norm(w - y) / np.linalg.norm(Tw - Ty), lam)
    return x_next, float(lam_next), float(np.linalg.norm(w - y))


def run_pcm_he(prob, lam, x0, gamma=1.5, eps=1e-6, max_iter=10_000, mu=None):
    """He's projection-contraction method with a prox step.

    ``lam`` is the constant stepsize, or the initial one when ``mu`` is given
    (then the self-adaptive rule ``min(mu ||x - y|| / ||T x - T y||, lam)``
    is applied after every step).
    """
    if not 0 < gamma < 2:
        raise ValueError("gamma must lie in (0, 2)")
    if lam <= 0:
        raise ValueError("lam must be positive")
    x = as_vector(x0, "x0").copy()
    trace = _Trace(prob, eps)
    converged = False
    for _ in range(max_iter):
        x_next, lam_next, res = _pcm_step(prob, x, lam, gamma, mu)
        stop = trace.add(x, x_next, lam, res)
        x, lam = x_next, lam_next
        if stop:
            converged = True
            break
    return trace.result("pcm_he", x, converged,
                        {"lam": lam, "gamma": gamma, "mu": mu})


def dong_alpha(n):
    """Inertial weight ``0.3 - 1 / (5 (n + 1)^2)``."""
    return 0.3 - 1.0 / (5.0 * (n + 1) ** 2)


def run_pcm_dong(prob, lam, x0, x_prev=None, gamma=DONG_GAMMA, eps=1e-6,
                 max_iter=10_000, alpha_fn=dong_alpha, delta=0.9, alpha=0.4,
                 sigma=0.2):
    """Inertial projection-contraction method.

    ``w_n = x_n + alpha_n (x_n - x_{n-1})`` followed by one He step from
    ``w_n`` with constant stepsize ``lam``. ``delta``, ``alpha`` and
    ``sigma`` are accepted for parity with the published parameter list but
    do not enter this scheme; they are echoed in ``params``.
    """
    if not 0 < gamma < 2:
        raise ValueError("gamma must lie in (0, 2)")
    x = as_vector(x0, "x0").copy()
    x_old = x.copy() if x_prev is None else as_vector(x_prev, "x_prev").copy()
    trace = _Trace(prob, eps)
    converged = False
    for n in range(max_iter):
        a_n = alpha_fn(n)
        if not 0 <= a_n < 1:
            raise ValueError(f"inertial weight {a_n} at n={n} outside [0, 1)")
        w = x + a_n * (x - x_old)
        x_next, _, res = _pcm_step(prob, w, lam, gamma)
        stop = trace.add(x, x_next, lam, res)
        x_old, x = x, x_next
        if stop:
            converged = True
            break
    return trace.result("pcm_dong", x, converged, {
        "lam": lam, "gamma": gamma, "unused": {"delta": delta, "alpha": alpha, "sigma": sigma}})


def run_ppa_kim(prob, lam, x0, eps=1e-6, max_iter=10_000):
    """Kim's accelerated proximal point scheme on the forward-prox map.

    With ``c_n = (n - 1) / (n + 1)``::

        y_n = F_lam(w_{n-1})
        w_n = y_n + c_n (y_n - y_{n-1}) + c_n (w_{n-2} - y_{n-1})

    started from ``y_0 = w_0 = w_{-1} = x0``. The iterate is ``y_n``.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    y = as_vector(x0, "x0").copy()
    w = y.copy()
    w_old = y.copy()
    trace = _Trace(prob, eps)
    converged = False
    for k in range(max_iter):
        n = k + 1
        y_next = prob.forward_prox(w, lam)
        c = (n - 1) / (n + 1)
        w_next = y_next + c * (y_next - y) + c * (w_old - y)
        stop = trace.add(y, y_next, lam, float(np.linalg.norm(w - y_next)))
        y, w_old, w = y_next, w, w_next
        if stop:
            converged = True
            break
    return trace.result("ppa_kim", y, converged, {"lam": lam})


def mainge_coefficients(n, a=1.0, c=2.0, b=0.5, a1=0.5, a2=0.9, cbar=1.0):
    """``(alpha_n, delta_n)`` for the relaxed inertial proximal scheme.

    ``alpha_n = a1 * (1 - a / (n + c))`` rises towards ``a1`` and
    ``delta_n = a2 * b * (1 - cbar / (n + c))`` rises towards ``a2 * b``.
    """
    alpha_n = a1 * (1.0 - a / (n + c))
    delta_n = a2 * b * (1.0 - cbar / (n + c))
    return alpha_n, delta_n


def run_ppa_mainge(prob, lam, x0, x_prev=None, eps=1e-6, max_iter=10_000,
                   a=1.0, c=2.0, b=0.5, a1=0.5, a2=0.9, cbar=1.0):
    """Relaxed inertial proximal point scheme with one correction term.

    ::

        w_n     = y_n + alpha_n (y_n - y_{n-1}) + delta_n (w_{n-1} - y_n)
        y_{n+1} = w_n / (1 + alpha_n) + alpha_n / (1 + alpha_n) F_{lam (1 + alpha_n)}(w_n)

    with ``(alpha_n, delta_n)`` from :func:`mainge_coefficients` and
    ``y_0 = x0``, ``y_{-1} = x_prev``, ``w_{-1} = x0``.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    y = as_vector(x0, "x0").copy()
    y_old = y.copy() if x_prev is None else as_vector(x_prev, "x_prev").copy()
    w_old = y.copy()
    trace = _Trace(prob, eps)
    converged = False
    for n in range(max_iter):
        alpha_n, delta_n = mainge_coefficients(n, a, c, b, a1, a2, cbar)
        w = y + alpha_n * (y - y_old) + delta_n * (w_old - y)
        scaled = lam * (1.0 + alpha_n)
        fp = prob.forward_prox(w, scaled)
        y_next = w / (1.0 + alpha_n) + alpha_n / (1.0 + alpha_n) * fp
        stop = trace.add(y, y_next, scaled, float(np.linalg.norm(w - fp)))
        y_old, y, w_old = y, y_next, w
        if stop:
            converged = True
            break
    return trace.result("ppa_mainge", y, converged, {
        "lam": lam, "a": a, "c": c, "b": b, "a1": a1, "a2": a2, "cbar": cbar})


BASELINES = {
    "pcm_he": run_pcm_he,
    "pcm_dong": run_pcm_dong,
    "ppa_kim": run_ppa_kim,
    "ppa_mainge": run_ppa_mainge,
}

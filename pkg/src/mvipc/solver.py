"""Relaxed inertial proximal-and-contraction method with two correction terms.

One iteration, from ``x_n, x_{n-1}, w_{n-1}, w_{n-2}`` and stepsize ``lam_n``:

    w_n     = x_n + a (x_n - x_{n-1}) + dl (1 + a)(w_{n-1} - x_n) - a dl (w_{n-2} - x_{n-1})
    y_n     = prox_{lam_n g}(w_n - lam_n T w_n)
    d_n     = (w_n - y_n) - lam_n (T w_n - T y_n)
    tau_n   = <w_n - y_n, d_n> / ||d_n||^2      (0 when d_n = 0)
    z_n     = w_n - gamma tau_n d_n
    lam_n+1 = min(mu ||w_n - y_n|| / ||T w_n - T y_n||, lam_n)   (lam_n when T w_n = T y_n)
    x_n+1   = (1 - theta) w_n + theta z_n

with ``a = alpha`` and ``dl = delta``. When ``d_n = 0`` the point ``w_n``
already solves the problem and is returned as ``x_{n+1}``.

The optional monitors evaluate, per iteration and against a known solution
``r``, the descent inequality

    ||x_{n+1} - r||^2 <= ||w_n - r||^2 - xi ||x_{n+1} - w_n||^2,

the bound ``||w_n - y_n|| <= (1/(theta gamma)) (1 + mu q)/(1 - mu q) ||x_{n+1} - w_n||``
with ``q = lam_n / lam_{n+1}``, and the Lyapunov value ``Psi_n`` built from
``s_n = x_n + delta (w_{n-1} - x_n)``, which should never increase.
"""

import math
import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .numerics import as_vector

__all__ = [
    "ParameterError",
    "PcParams",
    "SolverState",
    "IterRecord",
    "RunResult",
    "xi_value",
    "delta_lower_bounds",
    "delta_bound_radicand",
    "psi_decrease_coefficient",
    "check_conditions",
    "validate_params",
    "default_params",
    "initial_state",
    "inertial_correction_point",
    "forward_prox",
    "contraction_direction",
    "tau_coefficient",
    "contraction_point",
    "update_stepsize",
    "relaxed_update",
    "psi_value",
    "step",
    "solve",
]

# ||d||^2 below this counts as d = 0
D_ZERO_SQ = 1e-28


class ParameterError(ValueError):
    """A parameter condition failed. ``condition`` names the inequality."""

    def __init__(self, condition, message):
        super().__init__(f"{condition}: {message}")
        self.condition = condition


def xi_value(theta, gamma):
    """``(1/theta) * ((2 - gamma)/gamma + 1 - theta)``."""
    return (1.0 / theta) * ((2.0 - gamma) / gamma + 1.0 - theta)


def delta_bound_radicand(alpha, xi, form="compact"):
    """Radicand of the second lower bound on delta.

    ``form="compact"`` uses ``a^4 + 2a^3 + 3a^2 + 4a xi + 2a + 1``;
    ``form="expanded"`` uses the discriminant of the quadratic in delta,
    ``(a(1+a) + 2a xi + 1)^2 - 4a xi * a(1 + a + xi)``. The two agree
    algebraically.
    """
    a = alpha
    if form == "compact":
        return a ** 4 + 2 * a ** 3 + 3 * a ** 2 + 4 * a * xi + 2 * a + 1
    if form == "expanded":
        return (a * (1 + a) + 2 * a * xi + 1) ** 2 - 4 * a * xi * (a * (1 + a + xi))
    raise ValueError(f"unknown form {form!r}")


def delta_lower_bounds(alpha, sigma, xi):
    """The two lower bounds delta must exceed. The second is ``-inf`` when alpha = 0."""
    first = alpha * (1 + sigma) / (1 + alpha * sigma)
    if alpha == 0:
        return first, -math.inf
    a = alpha
    second = (a * (1 + a) + 2 * a * xi + 1 - math.sqrt(delta_bound_radicand(a, xi))) / (2 * a * xi)
    return first, second


def psi_decrease_coefficient(alpha, delta, xi):
    """Coefficient of ``||s_n - s_{n-1}||^2`` in the one-step bound on ``Psi``.

    ``Psi`` is guaranteed non-increasing when this is negative.
    """
    a, dl = alpha, delta
    return (a * (1 + a) / (1 - dl) + a * xi * (1 - a)
            + a * dl * (1 - a) / (1 - dl) ** 2 - dl * (1 - a) / (1 - dl) ** 2)


@dataclass(frozen=True)
class PcParams:
    alpha: float
    delta: float
    theta: float
    gamma: float
    mu: float
    lam0: float
    sigma: float

    @property
    def xi(self):
        return xi_value(self.theta, self.gamma)

    def as_dict(self):
        return {"alpha": self.alpha, "delta": self.delta, "theta": self.theta,
                "gamma": self.gamma, "mu": self.mu, "lam0": self.lam0,
                "sigma": self.sigma, "xi": self.xi}


def check_conditions(alpha, delta, theta, gamma, sigma, mu=0.5, lam0=1.0):
    """Evaluate every parameter condition without raising.

    Returns a list of ``(condition, passed, detail)`` tuples in the order the
    conditions are checked by :func:`validate_params`.
    """
    out = [
        ("theta_range", 0 < theta < 1, f"theta={theta} in (0, 1)"),
        ("gamma_range", 0 < gamma < 2, f"gamma={gamma} in (0, 2)"),
        ("sigma_positive", sigma > 0, f"sigma={sigma} > 0"),
        ("mu_range", 0 < mu < 1, f"mu={mu} in (0, 1)"),
        ("lam0_positive", lam0 > 0, f"lam0={lam0} > 0"),
        ("alpha_range", 0 <= alpha < 1, f"alpha={alpha} in [0, 1)"),
    ]
    if sigma > 0:
        cap = sigma / (1 + sigma)
        out.append(("alpha_sigma_bound", alpha < cap,
                    f"alpha={alpha} < sigma/(1+sigma)={cap:.6g}"))
    out.append(("delta_range", 0 < delta < 1, f"delta={delta} in (0, 1)"))
    if 0 < theta < 1 and 0 < gamma < 2 and sigma > 0 and 0 <= alpha < 1:
        first, second = delta_lower_bounds(alpha, sigma, xi_value(theta, gamma))
        out.append(("delta_bound_inertia", delta > first,
                    f"delta={delta} > alpha(1+sigma)/(1+alpha sigma)={first:.6g}"))
        out.append(("delta_bound_quadratic", delta > second,
                    f"delta={delta} > {second:.6g}"))
    return out


def validate_params(alpha, delta, theta, gamma, mu=0.5, lam0=1.0, sigma=1.5):
    """Check the parameter conditions and return a :class:`PcParams`.

    Raises
    ------
    ParameterError
        For the first failing condition, with ``condition`` set to one of
        ``theta_range``, ``gamma_range``, ``sigma_positive``, ``mu_range``,
        ``lam0_positive``, ``alpha_range``, ``alpha_sigma_bound``,
        ``delta_range``, ``delta_bound_inertia`` or ``delta_bound_quadratic``.
    """
    for name, passed, detail in check_conditions(alpha, delta, theta, gamma, sigma, mu, lam0):
        if not passed:
            raise ParameterError(name, f"violated: {detail}")
    return PcParams(alpha, delta, theta, gamma, mu, lam0, sigma)


def default_params(lam0=1.0, mu=0.5):
    """alpha=0.5, delta=0.9, theta=0.4, gamma=1.5, sigma=1.5 (xi = 7/3)."""
    return validate_params(0.5, 0.9, 0.4, 1.5, mu=mu, lam0=lam0, sigma=1.5)


# ---------------------------------------------------------------------------
# state and records

@dataclass(frozen=True)
class SolverState:
    n: int
    x: np.ndarray
    x_prev: np.ndarray
    w_prev: np.ndarray
    w_prev2: np.ndarray
    lam: float


def initial_state(x0, lam0, x_prev=None, w_prev=None):
    """Starting state; ``w_{-2} = w_{-1}`` and missing history defaults to ``x0``."""
    x0 = as_vector(x0, "x0")
    x_prev = x0 if x_prev is None else as_vector(x_prev, "x_prev")
    w_prev = x0 if w_prev is None else as_vector(w_prev, "w_prev")
    return SolverState(0, x0.copy(), x_prev.copy(), w_prev.copy(), w_prev.copy(), float(lam0))


@dataclass(frozen=True)
class IterRecord:
    """Diagnostics for one iteration.

    ``tol`` is ``||x_{n+1} - x_n||``, ``lam`` the stepsize used at this
    iteration and ``res_wy`` is ``||w_n - y_n||``. ``descent_gap`` and
    ``wy_bound_gap`` are the slacks of the two per-iteration inequalities
    (nonnegative when they hold); they and ``psi`` are only filled when
    monitoring is on.
    """

    n: int
    tol: float
    lam: float
    res_wy: float
    psi: Optional[float] = None
    dist_sol: Optional[float] = None
    elapsed_ns: int = 0
    certified: bool = False
    descent_gap: Optional[float] = None
    wy_bound_gap: Optional[float] = None


@dataclass
class RunResult:
    method: str
    x: np.ndarray
    converged: bool
    trace: list
    certified: bool = False
    params: dict = field(default_factory=dict)

    @property
    def iterations(self):
        return len(self.trace)

    @property
    def final_tol(self):
        return self.trace[-1].tol if self.trace else math.nan

    @property
    def final_dist(self):
        return self.trace[-1].dist_sol if self.trace else None


# ---------------------------------------------------------------------------
# the sub-steps

def inertial_correction_point(state, p):
    """``w_n`` from the inertial term and the two correction terms."""
    a, dl = p.alpha, p.delta
    return (state.x + a * (state.x - state.x_prev)
            + dl * (1 + a) * (state.w_prev - state.x)
            - a * dl * (state.w_prev2 - state.x_prev))


def forward_prox(w, lam, prob, Tw=None):
    """``prox_{lam g}(w - lam T w)``."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    if Tw is None:
        Tw = prob.T(w)
    return prob.prox(w - lam * Tw, lam)


def contraction_direction(w, y, lam, prob, Tw=None, Ty=None):
    """``d = (w - y) - lam (T w - T y)``."""
    if Tw is None:
        Tw = prob.T(w)
    if Ty is None:
        Ty = prob.T(y)
    return (w - y) - lam * (Tw - Ty)


def tau_coefficient(w, y, d):
    """``<w - y, d> / ||d||^2``, or 0 when ``d`` vanishes."""
    dd = float(d @ d)
    if dd == 0.0 or dd < D_ZERO_SQ:
        return 0.0
    return float((w - y) @ d) / dd


def contraction_point(w, d, tau, gamma):
    """``z = w - gamma tau d``."""
    return w - gamma * tau * d


def update_stepsize(lam, w, y, mu, prob, Tw=None, Ty=None):
    """Self-adaptive stepsize: ``min(mu ||w - y|| / ||T w - T y||, lam)``."""
    if Tw is None:
        Tw = prob.T(w)
    if Ty is None:
        Ty = prob.T(y)
    diff = Tw - Ty
    if not np.any(diff != 0.0):
        return lam
    return min(mu * float(np.linalg.norm(w - y)) / float(np.linalg.norm(diff)), lam)


def relaxed_update(w, z, theta):
    """``(1 - theta) w + theta z``."""
    return (1.0 - theta) * w + theta * z


def psi_value(state, p, solution):
    """Lyapunov value ``Psi_n`` for the current state and a solution ``r``."""
    a, dl = p.alpha, p.delta
    s = state.x + dl * (state.w_prev - state.x)
    s_prev = state.x_prev + dl * (state.w_prev2 - state.x_prev)
    ds = s - s_prev
    er = s - solution
    er_prev = s_prev - solution
    return (float(er @ er) / (1 - dl) - a * float(er_prev @ er_prev) / (1 - dl)
            + dl * (1 - a) / (1 - dl) ** 2 * float(ds @ ds))


def step(state, p, prob, monitor=False):
    """Advance one iteration. Returns ``(next_state, record)``."""
    lam = state.lam
    w = inertial_correction_point(state, p)
    Tw = prob.T(w)
    y = forward_prox(w, lam, prob, Tw=Tw)
    Ty = prob.T(y)
    d = contraction_direction(w, y, lam, prob, Tw=Tw, Ty=Ty)
    dd = float(d @ d)
    certified = dd == 0.0 or dd < D_ZERO_SQ
    lam_next = update_stepsize(lam, w, y, p.mu, prob, Tw=Tw, Ty=Ty)
    if certified:
        x_next = w.copy()
    else:
        tau = float((w - y) @ d) / dd
        z = contraction_point(w, d, tau, p.gamma)
        x_next = relaxed_update(w, z, p.theta)

    res_wy = float(np.linalg.norm(w - y))
    sol = prob.solution
    psi = descent_gap = wy_bound_gap = None
    if monitor:
        if sol is not None:
            psi = psi_value(state, p, sol)
            ew = w - sol
            ex = x_next - sol
            step_xw = x_next - w
            descent_gap = float(ew @ ew) - p.xi * float(step_xw @ step_xw) - float(ex @ ex)
        ratio = p.mu * lam / lam_next
        if ratio < 1.0:
            bound = (1.0 / (p.theta * p.gamma)) * (1.0 + ratio) / (1.0 - ratio) \
                * float(np.linalg.norm(x_next - w))
            wy_bound_gap = bound - res_wy
        else:
            wy_bound_gap = math.inf  # bound is vacuous

    record = IterRecord(
        n=state.n,
        tol=float(np.linalg.norm(x_next - state.x)),
        lam=lam,
        res_wy=res_wy,
        psi=psi,
        dist_sol=None if sol is None else float(np.linalg.norm(x_next - sol)),
        certified=certified,
        descent_gap=descent_gap,
        wy_bound_gap=wy_bound_gap,
    )
    next_state = SolverState(state.n + 1, x_next, state.x, w, state.w_prev, lam_next)
    return next_state, record


def solve(prob, params, x0, x_prev=None, w_prev=None, eps=1e-6, max_iter=10_000,
          monitor=False):
    """Iterate until ``||x_{n+1} - x_n|| < eps``, ``d_n = 0`` or ``max_iter``.

    Parameters
    ----------
    prob : MviProblem
    params : PcParams
    x0, x_prev, w_prev : array_like
        Starting points ``x_0``, ``x_{-1}`` and ``w_{-1} = w_{-2}``; the last
        two default to ``x0``.
    eps : float
        Stopping threshold on ``||x_{n+1} - x_n||``.
    max_iter : int
    monitor : bool
        Fill the ``psi``, ``descent_gap`` and ``wy_bound_gap`` record fields.

    Returns
    -------
    RunResult
        ``converged`` is False if ``max_iter`` ran out.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    state = initial_state(x0, params.lam0, x_prev, w_prev)
    trace = []
    converged = certified = False
    start = time.perf_counter_ns()
    for _ in range(max_iter):
        state, rec = step(state, params, prob, monitor=monitor)
        trace.append(replace(rec, elapsed_ns=time.perf_counter_ns() - start))
        if rec.certified:
            converged = certified = True
            break
        if rec.tol < eps:
            converged = True
            break
    return RunResult("ripcm", state.x, converged, trace, certified, params.as_dict())

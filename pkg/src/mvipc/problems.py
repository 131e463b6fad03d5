"""Problem model and the bundled test problems.

A mixed variational inequality asks for ``x`` in ``dom g`` with

    <T x, u - x> + g(u) - g(x) >= 0    for all u in dom g.

:class:`MviProblem` carries ``T``, the prox of ``g`` and whatever metadata is
known (Lipschitz constant of ``T``, a solution, monotonicity class). The
three benchmark families are built by :func:`make_ex1`, :func:`make_ex2` and
:func:`make_ex3`.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .numerics import SeededRng, random_spd, spectral_radius_spd
from .prox import (ProxOperator, affine_box_projection, quadratic_form_prox,
                   sumsq_box_prox)

__all__ = [
    "MONOTONICITY_CLASSES",
    "MviProblem",
    "ProbeReport",
    "ex1_G",
    "make_ex1",
    "make_ex2",
    "make_ex3",
    "probe_pseudomonotonicity",
]

MONOTONICITY_CLASSES = ("monotone", "g_pseudomonotone", "generalized_monotone")


@dataclass(frozen=True)
class MviProblem:
    """A mixed variational inequality instance.

    Attributes
    ----------
    name : str
    dim : int
    operator : callable
        ``x -> T(x)``.
    prox : ProxOperator
        ``(u, lam) -> prox_{lam g}(u)``.
    g : callable, optional
        Value of ``g`` on its domain (``+inf`` outside).
    lipschitz : float, optional
        Lipschitz constant of ``T``.
    solution : ndarray, optional
        A known solution, used for distance diagnostics.
    monotonicity : str
        One of ``MONOTONICITY_CLASSES``; descriptive only.
    step_ref : float
        Reference stepsize used as the default ``lam0`` and as the constant
        stepsize of the baselines.
    meta : dict
        Problem data (matrices, eigenvalue estimates, ...).
    """

    name: str
    dim: int
    operator: Callable[[np.ndarray], np.ndarray]
    prox: ProxOperator
    g: Optional[Callable[[np.ndarray], float]] = None
    lipschitz: Optional[float] = None
    solution: Optional[np.ndarray] = None
    monotonicity: str = "monotone"
    step_ref: float = 1.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.monotonicity not in MONOTONICITY_CLASSES:
            raise ValueError(f"unknown monotonicity class {self.monotonicity!r}")

    def T(self, x):
        return self.operator(x)

    def forward_prox(self, x, lam):
        """``prox_{lam g}(x - lam T x)``; its fixed points are the solutions."""
        return self.prox(x - lam * self.operator(x), lam)

    def fixed_point_residual(self, x, lam=0.1):
        """``||x - prox_{lam g}(x - lam T x)||``, zero exactly at solutions."""
        x = np.asarray(x, dtype=np.float64)
        return float(np.linalg.norm(x - self.forward_prox(x, lam)))


# ---------------------------------------------------------------------------
# ex1: nonlinear T on an affine preimage of the unit square

EX1_M = np.array([[1.0, 2.0, 1.0], [1.0, 1.0, 1.0]])
EX1_D = np.array([0.5, 0.5])


def ex1_G(p):
    """The map ``G`` of ex1 evaluated at ``p = M x + d``.

    ``t`` is the nonnegative root of ``t**2 - p1 t - p2 = 0``. Off the unit
    square the root can be complex or negative; there the radicand and then
    ``t`` are clamped at zero so ``G`` stays finite and continuous.
    """
    p1, p2 = float(p[0]), float(p[1])
    if p1 == 0.0 and p2 == 0.0:
        return np.array([0.0, -1.0])
    t = 0.5 * (p1 + np.sqrt(max(p1 * p1 + 4.0 * p2, 0.0)))
    t = max(t, 0.0)
    return np.array([-t / (1.0 + t), -1.0 / (1.0 + t)])


def make_ex1():
    """ex1: ``T(x) = M^T G(M x + d)`` with ``g`` the indicator of ``{x : M x + d in [0,1]^2}``."""
    M, d = EX1_M, EX1_D

    def T(x):
        return M.T @ ex1_G(M @ x + d)

    def g(x):
        p = M @ x + d
        return 0.0 if np.all(p >= -1e-12) and np.all(p <= 1.0 + 1e-12) else np.inf

    return MviProblem(
        name="ex1", dim=3, operator=T,
        prox=affine_box_projection(M, d, 0.0, 1.0), g=g,
        monotonicity="g_pseudomonotone", step_ref=1.0,
        meta={"M": M, "d": d},
    )


# ---------------------------------------------------------------------------
# ex2: T(x) = 4 - x, g = sum of squares on [3, 5]^2

def _sumsq_on_box(lo, hi):
    def g(x):
        x = np.asarray(x, dtype=np.float64)
        if np.any(x < lo) or np.any(x > hi):
            return np.inf
        return float(x @ x)
    return g


def make_ex2():
    """ex2: ``T(x) = (4 - x1, 4 - x2)``, ``g(x) = x1**2 + x2**2`` on ``[3, 5]^2``.

    ``T`` is not monotone, but the pair satisfies the generalized
    monotonicity condition at the unique solution ``(3, 3)``.
    """
    return MviProblem(
        name="ex2", dim=2, operator=lambda x: 4.0 - x,
        prox=sumsq_box_prox(3.0, 5.0), g=_sumsq_on_box(3.0, 5.0),
        lipschitz=1.0, solution=np.array([3.0, 3.0]),
        monotonicity="generalized_monotone", step_ref=1.0,
    )


# ---------------------------------------------------------------------------
# ex3: linear T = D x, g = x^T B x, random SPD data

def make_ex3(n, seed, eig_lo=1.0, eig_hi=2.0):
    """ex3: ``T(x) = D x`` and ``g(x) = x^T B x`` with random SPD ``B``, ``D``.

    ``B`` and ``D`` come from two child streams of ``SeededRng(seed)`` with
    eigenvalues uniform on ``[eig_lo, eig_hi]``. The unique solution is the
    origin. The reference stepsize is ``0.99 / (2 rho(B))``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = SeededRng(seed)
    B = random_spd(n, rng.spawn(1), eig_lo, eig_hi)
    D = random_spd(n, rng.spawn(2), eig_lo, eig_hi)
    rho_B = spectral_radius_spd(B, tol=1e-12)
    rho_D = spectral_radius_spd(D, tol=1e-12)

    def g(x):
        x = np.asarray(x, dtype=np.float64)
        return float(x @ B @ x)

    return MviProblem(
        name="ex3", dim=n, operator=lambda x: D @ x,
        prox=quadratic_form_prox(B), g=g,
        lipschitz=rho_D, solution=np.zeros(n),
        monotonicity="monotone", step_ref=0.99 / (2.0 * rho_B),
        meta={"B": B, "D": D, "rho_B": rho_B, "rho_D": rho_D, "seed": seed},
    )


# ---------------------------------------------------------------------------
# one-dimensional probe: g-pseudomonotone but not pseudomonotone

@dataclass(frozen=True)
class ProbeReport:
    """Outcome of a monotonicity probe on a grid.

    ``counterexample`` is ``(u, v, <T u, v - u>, <T v, v - u>)`` when the
    plain pseudomonotonicity implication fails.
    """

    property: str
    samples: int
    violations: int
    counterexample: Optional[tuple] = None


def probe_pseudomonotonicity(points=201, tol=1e-12):
    """Probe ``T(u) = 4 - u`` with ``g(u) = u**2`` on ``[3, 5]``.

    Every grid pair ``(u, v)`` is tested for the g-pseudomonotone
    implication

        <T u, v - u> + g(v) - g(u) >= 0  ==>  <T v, v - u> + g(v) - g(u) >= 0,

    and the report counts violations (expected: none). The pair
    ``u = 3, v = 5`` is returned as the witness that the plain implication
    ``<T u, v - u> >= 0 ==> <T v, v - u> >= 0`` fails.
    """
    grid = np.linspace(3.0, 5.0, points)
    u = grid[:, None]
    v = grid[None, :]
    T = lambda z: 4.0 - z  # noqa: E731
    gap = v ** 2 - u ** 2
    premise = T(u) * (v - u) + gap
    conclusion = T(v) * (v - u) + gap
    violations = int(np.count_nonzero((premise >= -tol) & (conclusion < -tol)))

    u0, v0 = 3.0, 5.0
    witness = (u0, v0, T(u0) * (v0 - u0), T(v0) * (v0 - u0))
    return ProbeReport(
        property="g_pseudomonotone", samples=points * points,
        violations=violations, counterexample=witness,
    )

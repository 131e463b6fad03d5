"""Proximal-and-contraction solvers for mixed variational inequalities."""

from .baselines import (BASELINES, run_pcm_dong, run_pcm_he, run_ppa_kim,
                        run_ppa_mainge)
from .numerics import (ConvergenceError, NotPositiveDefiniteError, SeededRng,
                       random_spd, smallest_eigenvalue_spd, solve_spd,
                       spectral_radius_spd)
from .problems import (MviProblem, make_ex1, make_ex2, make_ex3,
                       probe_pseudomonotonicity)
from .prox import (ProjectionError, ProxOperator, affine_box_projection,
                   box_prox, project_affine_box, prox_box,
                   prox_quadratic_form, prox_sumsq_box, quadratic_form_prox,
                   sumsq_box_prox)
from .solver import (ParameterError, PcParams, RunResult, check_conditions,
                     default_params, delta_lower_bounds, solve, step,
                     validate_params, xi_value)

__version__ = "0.1.0"

__all__ = [
    "BASELINES", "ConvergenceError", "MviProblem", "NotPositiveDefiniteError",
    "ParameterError", "PcParams", "ProjectionError", "ProxOperator", "RunResult",
    "SeededRng", "affine_box_projection", "box_prox", "check_conditions",
    "default_params", "delta_lower_bounds", "make_ex1", "make_ex2", "make_ex3",
    "probe_pseudomonotonicity", "project_affine_box", "prox_box",
    "prox_quadratic_form", "prox_sumsq_box", "quadratic_form_prox", "random_spd",
    "run_pcm_dong", "run_pcm_he", "run_ppa_kim", "run_ppa_mainge",
    "smallest_eigenvalue_spd", "solve", "solve_spd", "spectral_radius_spd",
    "step", "sumsq_box_prox", "validate_params", "xi_value",
]

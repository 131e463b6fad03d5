"""Experiment runner and the ``mvipc-bench`` command line.

Subcommands::

    mvipc-bench run CONFIG [--output-dir DIR]
    mvipc-bench validate --alpha A --delta D --theta T --gamma G --sigma S
    mvipc-bench probe

``run`` reads an INI file with one section per experiment::

    [ex3_n20]
    problem = ex3          ; ex1 | ex2 | ex3
    dim = 20               ; forced to 3 for ex1 and 2 for ex2
    seeds = 1-5, 9         ; ranges and single values
    methods = ripcm, ppa_kim
    eps = 1e-6
    max_iter = 10000
    monitor = false
    alpha = 0.5            ; optional overrides: alpha delta theta gamma sigma mu lam0 lam

Unknown keys are rejected. The output root is ``--output-dir``, else the
``MVIPC_OUTPUT_DIR`` environment variable, else ``./results``. Each section
writes ``<root>/<section>/traces/<problem>_<method>_seed<k>.csv`` (columns
``n,tol,lambda,res_wy,psi,dist_sol,elapsed_ns``) and
``<root>/<section>/summary.csv`` (columns
``problem,method,seed,dim,iters,converged,final_tol,final_dist,wall_ms``).

Exit codes: 0 success, 1 invalid input, 2 runtime failure.
"""

import argparse
import configparser
import csv
import logging
import os
import statistics
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .baselines import run_pcm_dong, run_pcm_he, run_ppa_kim, run_ppa_mainge
from .numerics import SeededRng
from .problems import make_ex1, make_ex2, make_ex3, probe_pseudomonotonicity
from .solver import (ParameterError, check_conditions, delta_lower_bounds,
                     solve, validate_params, xi_value)

log = logging.getLogger(__name__)

ENV_OUTPUT = "MVIPC_OUTPUT_DIR"
METHODS = ("ripcm", "pcm_he", "pcm_dong", "ppa_kim", "ppa_mainge")
_JOL_NOTE = "its update rule is not specified in enough detail to implement"
UNAVAILABLE = {"jol": _JOL_NOTE, "alg_jol": _JOL_NOTE}
TRACE_COLUMNS = ("n", "tol", "lambda", "res_wy", "psi", "dist_sol", "elapsed_ns")
SUMMARY_COLUMNS = ("problem", "method", "seed", "dim", "iters", "converged",
                   "final_tol", "final_dist", "wall_ms")
FIXED_DIMS = {"ex1": 3, "ex2": 2}
START_BOX = 5.0
START_STREAM = 100

_FLOAT_KEYS = ("eps", "alpha", "delta", "theta", "gamma", "sigma", "mu", "lam0", "lam")
_KNOWN_KEYS = {"problem", "dim", "seeds", "methods", "max_iter", "monitor", *_FLOAT_KEYS}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    name: str
    problem: str
    dim: int
    seeds: list
    methods: list
    eps: float = 1e-6
    max_iter: int = 10_000
    monitor: bool = False
    overrides: dict = field(default_factory=dict)


@dataclass
class ResultsTable:
    rows: list
    aggregates: dict
    trace_files: list


# ---------------------------------------------------------------------------
# configuration

def _parse_seeds(text):
    seeds = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    return seeds


def _check_method(name):
    if name in UNAVAILABLE:
        raise ConfigError(f"method {name!r} is unavailable: {UNAVAILABLE[name]}")
    if name not in METHODS:
        raise ConfigError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")


def parse_config(text):
    """Parse INI text into a list of :class:`ExperimentSpec`."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    specs = []
    for name in cp.sections():
        sec = cp[name]
        unknown = set(sec.keys()) - _KNOWN_KEYS
        if unknown:
            raise ConfigError(f"[{name}] unknown keys: {', '.join(sorted(unknown))}")
        try:
            problem = sec.get("problem", "").strip()
            if problem not in ("ex1", "ex2", "ex3"):
                raise ConfigError(f"[{name}] problem must be ex1, ex2 or ex3, got {problem!r}")
            dim = FIXED_DIMS.get(problem, sec.getint("dim", fallback=20))
            if dim < 1:
                raise ConfigError(f"[{name}] dim must be >= 1")
            methods = [m.strip() for m in sec.get("methods", "").split(",") if m.strip()]
            for m in methods:
                _check_method(m)
            spec = ExperimentSpec(
                name=name, problem=problem, dim=dim,
                seeds=_parse_seeds(sec.get("seeds", "1")),
                methods=methods,
                eps=sec.getfloat("eps", fallback=1e-6),
                max_iter=sec.getint("max_iter", fallback=10_000),
                monitor=sec.getboolean("monitor", fallback=False),
                overrides={k: sec.getfloat(k) for k in _FLOAT_KEYS[1:] if k in sec},
            )
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"[{name}] {exc}") from exc
        if spec.eps <= 0 or spec.max_iter < 1:
            raise ConfigError(f"[{name}] eps must be positive and max_iter >= 1")
        specs.append(spec)
    return specs


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


# ---------------------------------------------------------------------------
# running

def make_problem(family, dim, seed):
    if family == "ex1":
        return make_ex1()
    if family == "ex2":
        return make_ex2()
    return make_ex3(dim, seed)


def random_starts(seed, dim):
    """``(x0, x_{-1}, w_{-1})`` drawn uniformly from ``[-5, 5]^dim``."""
    rng = SeededRng(seed).spawn(START_STREAM)
    return tuple(rng.uniform(-START_BOX, START_BOX, dim) for _ in range(3))


def run_method(method, prob, starts, eps, max_iter, monitor=False, overrides=None):
    """Run one method from the shared starting points."""
    ov = dict(overrides or {})
    x0, x_prev, w_prev = starts
    lam = ov.get("lam", prob.step_ref)
    if method == "ripcm":
        params = validate_params(
            ov.get("alpha", 0.5), ov.get("delta", 0.9), ov.get("theta", 0.4),
            ov.get("gamma", 1.5), mu=ov.get("mu", 0.5),
            lam0=ov.get("lam0", prob.step_ref), sigma=ov.get("sigma", 1.5))
        return solve(prob, params, x0, x_prev, w_prev, eps=eps, max_iter=max_iter,
                     monitor=monitor)
    if method == "pcm_he":
        return run_pcm_he(prob, lam, x0, eps=eps, max_iter=max_iter)
    if method == "pcm_dong":
        return run_pcm_dong(prob, lam, x0, x_prev, eps=eps, max_iter=max_iter)
    if method == "ppa_kim":
        return run_ppa_kim(prob, lam, x0, eps=eps, max_iter=max_iter)
    if method == "ppa_mainge":
        return run_ppa_mainge(prob, lam, x0, x_prev, eps=eps, max_iter=max_iter)
    _check_method(method)
    raise AssertionError("unreachable")


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_trace(path, trace):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for r in trace:
            writer.writerow([_fmt(r.n), _fmt(r.tol), _fmt(r.lam), _fmt(r.res_wy),
                             _fmt(r.psi), _fmt(r.dist_sol), _fmt(r.elapsed_ns)])


def run_experiment(spec, root):
    """Run every (seed, method) pair of ``spec`` and write its CSV files."""
    outdir = Path(root) / spec.name
    tracedir = outdir / "traces"
    tracedir.mkdir(parents=True, exist_ok=True)
    rows, files = [], []
    for seed in spec.seeds:
        prob = make_problem(spec.problem, spec.dim, seed)
        starts = random_starts(seed, prob.dim)
        for method in spec.methods:
            t0 = time.perf_counter()
            res = run_method(method, prob, starts, spec.eps, spec.max_iter,
                             spec.monitor, spec.overrides)
            wall_ms = (time.perf_counter() - t0) * 1e3
            path = tracedir / f"{spec.problem}_{method}_seed{seed}.csv"
            write_trace(path, res.trace)
            files.append(path)
            rows.append({
                "problem": spec.problem, "method": method, "seed": seed,
                "dim": prob.dim, "iters": res.iterations,
                "converged": int(res.converged), "final_tol": res.final_tol,
                "final_dist": res.final_dist, "wall_ms": wall_ms,
            })
            log.info("%s %s seed=%d iters=%d converged=%s", spec.problem, method,
                     seed, res.iterations, res.converged)
    with open(outdir / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in SUMMARY_COLUMNS])
    aggregates = {}
    for method in spec.methods:
        mine = [r for r in rows if r["method"] == method]
        aggregates[method] = {
            "runs": len(mine),
            "converged": sum(r["converged"] for r in mine),
            "median_iters": statistics.median(r["iters"] for r in mine),
            "median_wall_ms": statistics.median(r["wall_ms"] for r in mine),
        }
    return ResultsTable(rows, aggregates, files)


# ---------------------------------------------------------------------------
# CLI

def cmd_run(args):
    try:
        specs = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    root = args.output_dir or os.environ.get(ENV_OUTPUT) or "results"
    for spec in specs:
        try:
            table = run_experiment(spec, root)
        except ParameterError as exc:
            print(f"error: [{spec.name}] {exc}", file=sys.stderr)
            return 1
        except OSError as exc:
            print(f"error: [{spec.name}] cannot write output: {exc}", file=sys.stderr)
            return 2
        except Exception as exc:  # noqa: BLE001
            print(f"error: [{spec.name}] run failed: {exc}", file=sys.stderr)
            return 2
        print(f"[{spec.name}] {spec.problem} dim={spec.dim} seeds={len(spec.seeds)}")
        for method, agg in table.aggregates.items():
            print(f"  {method:<11} converged {agg['converged']}/{agg['runs']}"
                  f"  median iters {agg['median_iters']:g}"
                  f"  median wall {agg['median_wall_ms']:.2f} ms")
    return 0


def cmd_validate(args):
    theta, gamma, alpha, sigma, delta = args.theta, args.gamma, args.alpha, args.sigma, args.delta
    if 0 < theta < 1 and 0 < gamma < 2:
        xi = xi_value(theta, gamma)
        print(f"xi = {xi:.12g}")
        if sigma > 0:
            first, second = delta_lower_bounds(alpha, sigma, xi)
            print(f"delta lower bound (inertia)   = {first:.6g}")
            print(f"delta lower bound (quadratic) = {second:.6g}")
    ok = True
    for name, passed, detail in check_conditions(alpha, delta, theta, gamma, sigma):
        ok &= bool(passed)
        print(f"{'PASS' if passed else 'FAIL'}  {name:<22} {detail}")
    print("valid" if ok else "invalid")
    return 0 if ok else 1


def cmd_probe(args):
    rep = probe_pseudomonotonicity()
    u, v, tu, tv = rep.counterexample
    print(f"g-pseudomonotone on grid: {rep.samples} pairs, {rep.violations} violations")
    print(f"pseudomonotone counterexample: u={u:g}, v={v:g}, "
          f"<Tu, v-u> = {tu:g}, <Tv, v-u> = {tv:g}")
    expected = rep.violations == 0 and tu > 0 and tv < 0
    return 0 if expected else 2


def build_parser():
    parser = argparse.ArgumentParser(prog="mvipc-bench", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run experiments from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--output-dir", default=None,
                       help=f"output root (default: ${ENV_OUTPUT} or ./results)")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="check solver parameters")
    p_val.add_argument("--alpha", type=float, default=0.5)
    p_val.add_argument("--delta", type=float, default=0.9)
    p_val.add_argument("--theta", type=float, default=0.4)
    p_val.add_argument("--gamma", type=float, default=1.5)
    p_val.add_argument("--sigma", type=float, default=1.5)
    p_val.set_defaults(func=cmd_validate)

    p_probe = sub.add_parser("probe", help="run the pseudomonotonicity probe")
    p_probe.set_defaults(func=cmd_probe)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

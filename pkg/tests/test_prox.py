import numpy as np
import pytest

from mvipc.numerics import SeededRng, random_spd
from mvipc.problems import EX1_D, EX1_M, make_ex2
from mvipc.prox import (MAX_AFFINE_ROWS, ProjectionError,
                        affine_box_projection, box_prox, project_affine_box,
                        prox_box, prox_inequality_holds, prox_quadratic_form,
                        prox_sumsq_box, quadratic_form_prox, sumsq_box_prox)

from oracles import (grid_argmin_1d, kkt_residual, penalty_projection,
                     refine_argmin_1d)


class TestProxBox:
    def test_clamp(self):
        np.testing.assert_array_equal(prox_box([6.0, 2.0], [3, 3], [5, 5]), [5, 3])

    def test_inside(self):
        u = np.array([3.5, 4.9])
        np.testing.assert_array_equal(prox_box(u, 3, 5), u)

    def test_grid_oracle(self):
        rng = SeededRng(1)
        for _ in range(100):
            u = rng.uniform(0, 8, 2)
            got = prox_box(u, 3, 5)
            for i in range(2):
                best = grid_argmin_1d(lambda v: 0.5 * (u[i] - v) ** 2, 3, 5, 1e-3)
                assert abs(got[i] - best) <= 1e-3

    def test_inverted_bounds(self):
        with pytest.raises(ValueError):
            prox_box([0.0], 1.0, 0.0)

    def test_idempotent(self):
        rng = SeededRng(2)
        for _ in range(100):
            p = prox_box(rng.normal(4) * 5, -1, 2)
            np.testing.assert_array_equal(prox_box(p, -1, 2), p)

    def test_lambda_independent(self):
        P = box_prox(np.full(3, 3.0), np.full(3, 5.0))
        u = np.array([1.0, 4.0, 9.0])
        outs = [P(u, lam) for lam in (0.1, 1.0, 10.0)]
        assert all(np.array_equal(outs[0], o) for o in outs)
        assert P.tag == "box"


class TestProxSumsqBox:
    def test_interior_value(self):
        got = prox_sumsq_box([10.0], 3, 5, 1.0)[0]
        oracle = grid_argmin_1d(lambda v: v ** 2 + 0.5 * (10 - v) ** 2, 3, 5, 1e-6)
        assert abs(got - oracle) <= 1e-6
        assert got == pytest.approx(10 / 3, abs=1e-15)

    def test_upper_clamp(self):
        assert prox_sumsq_box([100.0], 3, 5, 1.0)[0] == 5.0

    @pytest.mark.parametrize("lam", [0.1, 0.5, 1.0, 2.0])
    def test_lower_boundary_exact(self, lam):
        assert prox_sumsq_box([3.0 * (1 + 2 * lam)], 3, 5, lam)[0] == 3.0

    def test_refined_grid_oracle(self):
        rng = SeededRng(3)
        for _ in range(100):
            u, lam = rng.uniform(-5, 20), rng.uniform(0.05, 3)
            got = prox_sumsq_box([u], 3, 5, lam)[0]
            oracle = refine_argmin_1d(lambda v: lam * v ** 2 + 0.5 * (u - v) ** 2, 3, 5)
            assert abs(got - oracle) <= 1e-5

    def test_parameter_errors(self):
        with pytest.raises(ValueError):
            prox_sumsq_box([1.0], 5, 3, 1.0)
        with pytest.raises(ValueError):
            prox_sumsq_box([1.0], 3, 5, 0.0)

    @pytest.mark.parametrize("lam", [0.1, 0.5, 1.0])
    def test_ex2_solution_is_fixed_point(self, lam):
        prob = make_ex2()
        r = np.array([3.0, 3.0])
        assert np.linalg.norm(r - prob.forward_prox(r, lam)) <= 1e-10


class TestProxQuadraticForm:
    def test_identity(self):
        u = np.array([2.0, -4.0, 6.0])
        np.testing.assert_allclose(prox_quadratic_form(u, np.eye(3), 0.5), u / 2, atol=1e-15)

    def test_zero_matrix(self):
        u = np.array([2.0, -4.0])
        np.testing.assert_allclose(prox_quadratic_form(u, np.zeros((2, 2)), 1.0), u)

    def test_stationarity(self):
        rng = SeededRng(4)
        B = random_spd(5, rng)
        for _ in range(100):
            u, lam = rng.normal(5) * 3, rng.uniform(0.01, 2)
            v = prox_quadratic_form(u, B, lam)
            assert np.linalg.norm(2 * lam * B @ v + v - u) <= 1e-9

    def test_cached_operator_matches_direct(self):
        rng = SeededRng(5)
        B = random_spd(6, rng)
        P = quadratic_form_prox(B)
        for lam in (0.3, 0.3, 0.7, 0.3):
            u = rng.normal(6)
            np.testing.assert_allclose(P(u, lam), prox_quadratic_form(u, B, lam), atol=1e-14)

    def test_rejects_nonpositive_lambda(self):
        with pytest.raises(ValueError):
            prox_quadratic_form([1.0], np.eye(1), 0.0)


class TestProjectAffineBox:
    def test_feasible_origin(self):
        np.testing.assert_array_equal(project_affine_box(np.zeros(3), EX1_M, EX1_D, 0, 1), 0)

    def test_scalar_clamp(self):
        out = project_affine_box([2.0], np.eye(1), [0.0], 0, 1)
        np.testing.assert_allclose(out, [1.0])

    def test_penalty_oracle_at_ones(self):
        u = np.ones(3)
        got = project_affine_box(u, EX1_M, EX1_D, 0, 1)
        np.testing.assert_allclose(got, penalty_projection(u, EX1_M, EX1_D, 0, 1), atol=1e-5)

    def test_penalty_and_kkt_oracles_random(self):
        rng = SeededRng(6)
        for _ in range(100):
            u = rng.uniform(-5, 5, 3)
            got = project_affine_box(u, EX1_M, EX1_D, 0, 1)
            assert kkt_residual(got, u, EX1_M, EX1_D, 0.0, 1.0) <= 1e-9
        for _ in range(10):
            u = rng.uniform(-5, 5, 3)
            got = project_affine_box(u, EX1_M, EX1_D, 0, 1)
            np.testing.assert_allclose(got, penalty_projection(u, EX1_M, EX1_D, 0, 1), atol=1e-5)

    def test_idempotent(self):
        rng = SeededRng(7)
        for _ in range(100):
            p = project_affine_box(rng.uniform(-5, 5, 3), EX1_M, EX1_D, 0, 1)
            np.testing.assert_allclose(project_affine_box(p, EX1_M, EX1_D, 0, 1), p, atol=1e-12)

    def test_too_many_rows(self):
        m = MAX_AFFINE_ROWS + 1
        with pytest.raises(ValueError):
            project_affine_box(np.zeros(m), np.eye(m), np.zeros(m), 0, 1)

    def test_infeasible(self):
        M = np.array([[1.0], [1.0]])
        with pytest.raises(ProjectionError):
            project_affine_box([5.0], M, [0.0, 0.0], [0.0, 2.0], [1.0, 3.0])

    def test_degenerate_rows_pick_unique_point(self):
        # two copies of the same constraint: several active sets are KKT points
        M = np.array([[1.0, 0.0], [1.0, 0.0]])
        out = project_affine_box([3.0, 1.0], M, [0.0, 0.0], 0, 1)
        np.testing.assert_allclose(out, [1.0, 1.0], atol=1e-12)


def _operators():
    rng = SeededRng(8)
    B = random_spd(3, rng)
    return [
        ("box", box_prox(np.full(3, -1.0), np.full(3, 2.0))),
        ("sumsq_box", sumsq_box_prox(3.0, 5.0)),
        ("quadratic_form", quadratic_form_prox(B)),
        ("affine_box", affine_box_projection(EX1_M, EX1_D, 0.0, 1.0)),
    ]


@pytest.mark.parametrize("name,P", _operators())
def test_firm_nonexpansive(name, P):
    rng = SeededRng(9)
    for _ in range(1000):
        u, v = rng.uniform(-6, 6, 3), rng.uniform(-6, 6, 3)
        lam = rng.uniform(0.05, 2)
        du = P(u, lam) - P(v, lam)
        assert du @ du <= du @ (u - v) + 1e-9


class TestProxInequality:
    def test_v_equal_prox_point(self):
        P = box_prox(3.0, 5.0)
        g = lambda x: 0.0  # noqa: E731
        u = np.array([7.0, 1.0])
        assert prox_inequality_holds(P, g, u, P(u, 1.0), 1.0)

    def test_box_random(self):
        rng = SeededRng(10)
        P = box_prox(3.0, 5.0)
        g = lambda x: 0.0  # noqa: E731
        for _ in range(1000):
            assert prox_inequality_holds(P, g, rng.uniform(0, 8, 2), rng.uniform(3, 5, 2),
                                         rng.uniform(0.1, 2))

    def test_quadratic_form_random(self):
        rng = SeededRng(11)
        B = random_spd(4, rng)
        P = quadratic_form_prox(B)
        g = lambda x: float(x @ B @ x)  # noqa: E731
        for _ in range(1000):
            assert prox_inequality_holds(P, g, rng.normal(4) * 3, rng.normal(4) * 3,
                                         rng.uniform(0.1, 2))

    def test_detects_wrong_prox(self):
        B = np.eye(2)
        g = lambda x: float(x @ B @ x)  # noqa: E731
        identity = lambda u, lam: np.asarray(u)  # noqa: E731
        assert not prox_inequality_holds(identity, g, np.array([1.0, 1.0]), np.zeros(2), 1.0)

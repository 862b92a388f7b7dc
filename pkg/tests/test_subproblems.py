import math

import numpy as np
import pytest

from cgtoolkit.subproblems import (SubproblemError, brute_force_grid, brute_force_solve,
                                   lmo_kinds, make_lmo)


def all_kinds(dim):
    return [
        make_lmo("simplex-linear", dim, radius=1.0),
        make_lmo("box-linear", dim, lower=-1.0, upper=1.0),
        make_lmo("l1ball-linear", dim, radius=1.0),
        make_lmo("box-l1reg", dim, lower=-1.0, upper=1.0, weight=0.5),
        make_lmo("simplex-entropy", dim),
        make_lmo("lpnorm-squared", dim, p=1.5),
    ]


def test_kind_registry_complete():
    assert set(lmo_kinds()) == {"simplex-linear", "box-linear", "l1ball-linear",
                                "box-l1reg", "simplex-entropy", "lpnorm-squared"}


# ---------------------------------------------------------------------------
# Closed-form solutions on pinned inputs
# ---------------------------------------------------------------------------

def test_simplex_linear_picks_cheapest_vertex():
    lmo = make_lmo("simplex-linear", 3, radius=1.0)
    assert np.array_equal(lmo.solve(np.array([3.0, 1.0, 2.0])), [0.0, 1.0, 0.0])
    # ties break to the lowest index
    assert np.array_equal(lmo.solve(np.zeros(3)), [1.0, 0.0, 0.0])


def test_box_linear_corner_rule():
    lmo = make_lmo("box-linear", 3, lower=-1.0, upper=2.0)
    out = lmo.solve(np.array([1.0, -1.0, 0.0]))
    assert np.array_equal(out, [-1.0, 2.0, -1.0])  # g = 0 goes to the lower bound


def test_l1ball_signed_vertex_and_zero_gradient():
    lmo = make_lmo("l1ball-linear", 3, radius=2.0)
    assert np.array_equal(lmo.solve(np.array([1.0, -3.0, 2.0])), [0.0, 2.0, 0.0])
    assert np.array_equal(lmo.solve(np.zeros(3)), np.zeros(3))


def test_box_l1reg_candidate_enumeration():
    lmo = make_lmo("box-l1reg", 2, lower=-1.0, upper=1.0, weight=0.5)
    assert np.array_equal(lmo.solve(np.array([0.3, -0.8])), [0.0, 1.0])


def test_lp2_unconstrained_first_order_condition():
    lmo = make_lmo("lpnorm-squared", 2, p=2.0)
    u = lmo.solve(np.array([1.0, 1.0]))
    assert np.array_equal(u, [-1.0, -1.0])
    assert lmo.objective(np.array([1.0, 1.0]), u) == pytest.approx(-1.0, abs=1e-15)


def test_lp15_closed_form_matches_line_search():
    lmo = make_lmo("lpnorm-squared", 2, p=1.5)
    g = np.array([2.0, 0.0])
    u = lmo.solve(g)
    assert np.allclose(u, [-2.0, 0.0], atol=1e-12)
    # golden-section search along span{e1} as an independent 1-D oracle
    lo, hi = -5.0, 0.0
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    obj = lambda t: lmo.objective(g, np.array([t, 0.0]))
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    for _ in range(200):
        if obj(c) < obj(d):
            b, d = d, c
            c = b - phi * (b - a)
        else:
            a, c = c, d
            d = a + phi * (b - a)
    t_star = 0.5 * (a + b)
    assert u[0] == pytest.approx(t_star, abs=1e-6)


def test_entropy_softmax_values():
    lmo = make_lmo("simplex-entropy", 3)
    assert np.allclose(lmo.solve(np.zeros(3)), np.full(3, 1 / 3), atol=1e-15)
    lmo2 = make_lmo("simplex-entropy", 2)
    u = lmo2.solve(np.array([math.log(2.0), 0.0]))
    assert np.allclose(u, [1 / 3, 2 / 3], atol=1e-12)
    # cross-check against a fine grid on the simplex
    grid = brute_force_grid(lmo2, np.zeros(2), 100001)
    objs = grid @ np.array([math.log(2.0), 0.0]) + np.array(
        [lmo2.h_value(p) for p in grid])
    best = grid[int(np.argmin(objs))]
    assert np.allclose(u, best, atol=1e-4)
    assert lmo2.objective(np.array([math.log(2.0), 0.0]), u) <= objs.min() + 1e-6


def test_entropy_vertex_value_finite():
    lmo = make_lmo("simplex-entropy", 3)
    vertex = np.array([1.0, 0.0, 0.0])
    assert lmo.h_value(vertex) == 0.0
    assert np.all(np.isfinite(lmo.h_subgrad(vertex)))


def test_nan_and_shape_rejection():
    lmo = make_lmo("simplex-linear", 3)
    with pytest.raises(SubproblemError):
        lmo.solve(np.array([1.0, np.nan, 0.0]))
    with pytest.raises(SubproblemError):
        lmo.solve(np.array([np.inf, 0.0, 0.0]))
    with pytest.raises(SubproblemError):
        lmo.solve(np.zeros(4))


def test_parameter_validation():
    with pytest.raises(SubproblemError):
        make_lmo("lpnorm-squared", 2, p=1.0)
    with pytest.raises(SubproblemError):
        make_lmo("lpnorm-squared", 2, p=2.5)
    with pytest.raises(SubproblemError):
        make_lmo("simplex-linear", 2, radius=0.0)
    with pytest.raises(SubproblemError):
        make_lmo("box-linear", 2, lower=1.0, upper=-1.0)
    with pytest.raises(SubproblemError):
        make_lmo("no-such-kind", 2)


def test_lp_ball_guard_rejects_escaping_solution():
    lmo = make_lmo("lpnorm-squared", 2, p=2.0, ball_radius=0.5)
    with pytest.raises(SubproblemError):
        lmo.solve(np.array([2.0, 0.0]))  # unconstrained solution has norm 2
    small = lmo.solve(np.array([0.2, 0.1]))
    assert np.linalg.norm(small) <= 0.5 + 1e-12


# ---------------------------------------------------------------------------
# Structural invariants
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("dim", [2, 3])
def test_returned_points_feasible(dim, rng):
    for lmo in all_kinds(dim):
        for _ in range(50):
            u = lmo.solve(rng.standard_normal(dim) * 3.0)
            assert lmo.contains(u, tol=1e-12)
            if lmo.kind.startswith("simplex"):
                assert abs(u.sum() - 1.0) <= 1e-12
                assert np.all(u >= 0.0)
            if lmo.kind == "l1ball-linear":
                assert np.abs(u).sum() <= 1.0 + 1e-12


@pytest.mark.parametrize("dim", [2, 3])
def test_optimality_against_grid_oracle(dim, rng):
    for lmo in all_kinds(dim):
        res = 81 if dim == 3 else 161
        for _ in range(60):
            g = rng.standard_normal(dim) * 2.0
            u = lmo.solve(g)
            v = brute_force_solve(lmo, g, res)
            assert lmo.objective(g, u) <= lmo.objective(g, v) + 1e-6 * (1.0 + np.linalg.norm(g))


def test_variational_inequality_strongly_convex_kinds(rng):
    # <g + p_h(u*), u - u*> >= 0 for any feasible u, up to round-off
    for lmo in (make_lmo("simplex-entropy", 3), make_lmo("lpnorm-squared", 3, p=1.5),
                make_lmo("lpnorm-squared", 3, p=2.0)):
        for _ in range(100):
            g = rng.standard_normal(3)
            u_star = lmo.solve(g)
            residual = g + lmo.h_subgrad(u_star)
            for _ in range(20):
                u = lmo.sample(rng)
                assert float(residual @ (u - u_star)) >= -1e-9


def test_positive_homogeneity_of_linear_kinds(rng):
    for kind, params in (("simplex-linear", {"radius": 1.0}),
                         ("box-linear", {"lower": -1.0, "upper": 1.0}),
                         ("l1ball-linear", {"radius": 1.0})):
        lmo = make_lmo(kind, 3, **params)
        for _ in range(50):
            g = rng.standard_normal(3)
            base = lmo.solve(g)
            for c in (0.5, 2.0, 1e6):
                assert np.array_equal(lmo.solve(c * g), base)


def test_determinism_bitwise(rng):
    for lmo in all_kinds(3):
        g = rng.standard_normal(3)
        a = lmo.solve(g)
        b = lmo.solve(g.copy())
        assert a.tobytes() == b.tobytes()


def test_implied_strong_convexity_parameters():
    assert make_lmo("simplex-entropy", 4).mu == 1.0
    assert make_lmo("simplex-entropy", 4, radius=2.0, scale=3.0).mu == 1.5
    assert make_lmo("lpnorm-squared", 4, p=1.5).mu == 0.5
    assert make_lmo("lpnorm-squared", 4, p=2.0).mu == 1.0
    for kind, params in (("simplex-linear", {}), ("box-linear", {"lower": 0, "upper": 1}),
                         ("l1ball-linear", {}), ("box-l1reg", {"lower": 0, "upper": 1})):
        assert make_lmo(kind, 4, **params).mu == 0.0


def test_diameters():
    assert make_lmo("simplex-linear", 3).diameter("l2") == pytest.approx(math.sqrt(2))
    assert make_lmo("simplex-linear", 3).diameter("l1") == 2.0
    assert make_lmo("l1ball-linear", 3, radius=2.0).diameter() == 4.0
    assert make_lmo("box-linear", 4, lower=0.0, upper=1.0).diameter() == 2.0
    assert make_lmo("lpnorm-squared", 3, p=2.0).diameter() == math.inf
    assert make_lmo("lpnorm-squared", 3, p=2.0, ball_radius=1.5).diameter() == 3.0


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

def test_brute_linear_kind_gap_bound(rng):
    lmo = make_lmo("box-linear", 2, lower=-1.0, upper=1.0)
    for _ in range(20):
        g = rng.standard_normal(2)
        v = brute_force_solve(lmo, g, 201)
        gap = lmo.objective(g, v) - lmo.objective(g, lmo.solve(g))
        assert 0.0 <= gap <= 1e-2 * np.linalg.norm(g)


def test_brute_entropy_gap_bound(rng):
    lmo = make_lmo("simplex-entropy", 3)
    for _ in range(10):
        g = rng.standard_normal(3)
        v = brute_force_solve(lmo, g, 401)
        gap = lmo.objective(g, v) - lmo.objective(g, lmo.solve(g))
        assert 0.0 <= gap <= 5e-3


def test_brute_zero_gradient_symmetric_set():
    lmo = make_lmo("l1ball-linear", 2, radius=1.0)
    g = np.zeros(2)
    v = brute_force_solve(lmo, g, 41)
    assert lmo.objective(g, v) == pytest.approx(lmo.objective(g, lmo.solve(g)), abs=1e-12)


def test_brute_dimension_guard():
    lmo = make_lmo("simplex-linear", 5)
    with pytest.raises(SubproblemError):
        brute_force_solve(lmo, np.zeros(5), 11)
    with pytest.raises(SubproblemError):
        brute_force_solve(make_lmo("simplex-linear", 2), np.zeros(2), 1)

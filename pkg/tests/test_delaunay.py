import json
import math

from hypothesis import given, strategies as st
import numpy as np
import pytest

from cmclab.delaunay import (
    Branch,
    DelaunayParams,
    USolution,
    branch_of,
    constant_w,
    first_integral_residual,
    make_params,
    ode_residual_general_n,
    u_closed,
    u_closed_solution,
    u_numeric,
    u_range,
    uprime_closed,
)
from cmclab.errors import BranchMismatch, Breakdown, NonPositiveU0, NonPositiveW

triples = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.3, 3))


@pytest.mark.parametrize("c,H,u0,C,disc,branch", [
    (0, 0, 1, 1, 1, Branch.PARABOLIC),
    (0, 1, 1, 4, 0, Branch.OSCILLATORY),
    (1, 0, 1, 2, 0, Branch.OSCILLATORY),
])
def test_make_params_examples(c, H, u0, C, disc, branch):
    p = make_params(c, H, u0)
    assert p.C == pytest.approx(C) and p.discriminant == pytest.approx(disc, abs=1e-14)
    assert p.branch is branch


def test_make_params_rejects_nonpositive_u0():
    with pytest.raises(NonPositiveU0):
        make_params(0, 0, 0)


def test_branch_of():
    assert branch_of(0.1) is Branch.OSCILLATORY
    assert branch_of(-0.1) is Branch.HYPERBOLIC
    assert branch_of(0.0) is Branch.PARABOLIC


def test_catenoid_closed_form():
    s = np.linspace(0, 3, 31)
    p = make_params(0, 0, 1)
    np.testing.assert_allclose(u_closed(p, s), 1 + s * s, atol=1e-14)
    np.testing.assert_allclose(uprime_closed(p, s), 2 * s, atol=1e-14)


def test_clifford_constant_solution():
    p = make_params(1, 0, 1)
    np.testing.assert_allclose(u_closed(p, np.linspace(0, 10, 50)), 1.0, atol=1e-15)
    sol = u_numeric(p, 10.0)
    assert np.max(np.abs(sol.u - 1)) < 1e-9


@given(triples)
def test_initial_conditions(t):
    c, H, u0 = t
    p = make_params(c, H, u0)
    assert float(u_closed(p, 0.0)) == pytest.approx(u0, rel=1e-13)
    assert float(uprime_closed(p, 0.0)) == pytest.approx(0.0, abs=1e-12)


@given(triples)
def test_closed_form_satisfies_first_integral(t):
    c, H, u0 = t
    p = make_params(c, H, u0)
    s = np.linspace(0, min(2.0, p.period), 41)
    u, up = u_closed(p, s), uprime_closed(p, s)
    scale = 1 + np.abs(p.kappa) * u * u + abs(p.C - 2 * H) * u + 0.25 * up * up
    assert np.max(np.abs(first_integral_residual(u, up, p)) / scale) < 1e-13


@given(triples)
def test_closed_form_stays_in_range(t):
    p = make_params(*t)
    lo, hi = u_range(p)
    u = u_closed(p, np.linspace(0, min(4.0, 2 * p.period), 201))
    assert np.all(u >= lo * (1 - 1e-12)) and np.all(u <= hi * (1 + 1e-12))


def test_u_range_examples():
    assert u_range(make_params(0, 1, 1)) == pytest.approx((1, 1))
    assert u_range(make_params(1, 0, 2)) == pytest.approx((0.5, 2))
    lo, hi = u_range(make_params(0, 0, 1))
    assert lo == 1 and math.isinf(hi)


def test_oscillation_period():
    p = make_params(-1, 2, 0.3)
    assert p.period == pytest.approx(math.pi / math.sqrt(3))
    sol = u_numeric(p, 2 * p.period)
    i = len(sol.s) // 2
    assert sol.u[i] == pytest.approx(0.3, abs=1e-6)
    assert sol.u[-1] == pytest.approx(0.3, abs=1e-6)


def test_numeric_matches_catenoid():
    sol = u_numeric(make_params(0, 0, 1), 2.0, 1e-4)
    assert np.max(np.abs(sol.u - (1 + sol.s**2))) < 1e-8


@pytest.mark.parametrize("c,H,u0", [(0, 0.5, 0.7), (1, 0.2, 1.5), (-0.2, 0.3, 1.0), (-1, 2, 0.3)])
def test_numeric_matches_closed_form(c, H, u0):
    p = make_params(c, H, u0)
    sol = u_numeric(p, min(3.0, p.period))
    assert np.max(np.abs(sol.u - u_closed(p, sol.s))) < 1e-9


def test_residual_examples():
    p = make_params(0, 0, 1)
    s = np.linspace(0, 2, 11)
    assert np.all(first_integral_residual(1 + s * s, 2 * s, p) == 0)
    perturbed = first_integral_residual(1 + s * s + 1e-3, 2 * s, p)
    np.testing.assert_allclose(perturbed, -(p.C - 2 * p.H) * 1e-3, atol=1e-12)
    q = make_params(1, 0, 1)
    assert abs(first_integral_residual(1.0, 0.0, q)) < 1e-12


def test_branch_mismatch():
    p = make_params(0, 0, 1)
    bad = DelaunayParams(p.c, p.H, p.u0, p.C, Branch.OSCILLATORY)
    with pytest.raises(BranchMismatch):
        u_closed(bad, 0.0)


def test_breakdown_carries_partial_solution():
    # u0 is the maximum; the minimum 1/(kappa u0) at s = pi/2 lies below the floor
    p = make_params(0, 1, 1e11)
    with pytest.raises(Breakdown) as info:
        u_numeric(p, math.pi / 2, 1e-3)
    assert info.value.s_star == pytest.approx(math.pi / 2)
    partial = info.value.solution
    assert len(partial.s) > 1 and np.all(partial.u > 0)


def test_general_n_reduces_to_n2():
    w = np.linspace(0.5, 2, 7)
    wpp = np.linspace(-1, 1, 7)
    for a in (1, -1):
        np.testing.assert_array_equal(
            ode_residual_general_n(w, wpp, 0.3, 0.7, n=2, a=a), wpp + w * (0.3 + 0.7 * 0.7 - w**-4)
        )
    np.testing.assert_allclose(ode_residual_general_n(w, wpp, 0, 0, n=3), wpp - 2 * w**-5)


def test_general_n_constant_solution_example():
    n = 3
    w = ((n - 1) / 1.0) ** (1 / (2 * n))
    assert abs(ode_residual_general_n(w, 0.0, 1, 0, n=n)) < 1e-12
    assert constant_w(1, 0, n) == pytest.approx([w])


@given(st.floats(-1, 1), st.floats(-2, 2), st.sampled_from([2, 3, 4, 5]), st.sampled_from([1, -1]))
def test_constant_solutions_vanish(c, H, n, a):
    for w in constant_w(c, H, n, a):
        assert abs(ode_residual_general_n(w, 0.0, c, H, n, a)) < 1e-10 * max(1.0, w)


def test_general_n_rejects_nonpositive_w():
    with pytest.raises(NonPositiveW):
        ode_residual_general_n(np.array([1.0, 0.0]), 0.0, 0, 0)


def test_usolution_json_roundtrip(tmp_path):
    sol = u_closed_solution(make_params(1, 0.2, 1.5), 1.0, 0.01)
    text = json.dumps(sol.to_dict())
    back = USolution.from_dict(json.loads(text))
    assert back.params == sol.params
    np.testing.assert_array_equal(back.u, sol.u)
    sol.to_csv(tmp_path / "u.csv")
    header = (tmp_path / "u.csv").read_text().splitlines()[0]
    assert header == "s,u,uprime,lambda,mu,residual"


def test_interpolant_is_accurate():
    p = make_params(0.5, 0.3, 1.2)
    sol = u_numeric(p, 2.0, 1e-3)
    spline = sol.interpolant()
    s = np.linspace(0, 2, 777)
    assert np.max(np.abs(spline(s) - u_closed(p, s))) < 1e-9


@given(triples)
def test_curvature_mean_is_constant(t):
    c, H, u0 = t
    sol = u_closed_solution(make_params(c, H, u0), 1.0, 0.1)
    lam, mu = sol.curvatures()
    np.testing.assert_allclose(0.5 * (lam + mu), H, atol=1e-12)


@pytest.mark.parametrize("c,H,u0", [(-1, 0, 1.5), (-1, 0.5, 0.5), (-0.8, 0.2, 2.0)])
def test_steep_hyperbolic_conservation_is_limited_by_rounding(c, H, u0):
    # |kappa| u^2 reaches ~1e8 here, so the absolute residual can only be judged against that scale
    p = make_params(c, H, u0)
    sol = u_numeric(p, 5.0, 1e-4)
    scale = np.abs(p.kappa) * sol.u**2 + 0.25 * sol.uprime**2 + 1
    assert np.max(np.abs(sol.residual()) / scale) < 1e-13

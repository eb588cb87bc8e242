import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gssym import linear
from gssym.errors import ParameterError
from gssym.expr import Function, as_expr, evaluate, jet_eval
from gssym.grid import GridSpec, sample_solution
from gssym.linear import particular_solution, radial_solve, separable, superpose, z_factor
from gssym.residual import gs_lhs, grid_residual, residual


def _ls_scale(num, ref):
    return float(np.dot(num, ref) / np.dot(num, num))


def test_sine_branch():
    sol = radial_solve(-1.0, 0.0, r_max=3.0)
    r = np.linspace(1e-3, 3.0, 400)
    ref = np.sin(r * r / 2)
    k = _ls_scale(sol(r), ref)
    assert k == pytest.approx(0.5, rel=1e-9)  # normalisation R/r^2 -> 1
    np.testing.assert_allclose(k * sol(r), ref, atol=1e-8)


def test_bessel_branch():
    sol = radial_solve(0.0, 1.0, r_max=10.0)
    r = np.linspace(1e-3, 10.0, 400)
    from scipy.special import j1

    ref = r * j1(r)
    k = ref[np.searchsorted(r, 1.0)] / sol(r[np.searchsorted(r, 1.0)])
    np.testing.assert_allclose(k * sol(r), ref, atol=1e-6)


def test_bounded_oscillating_branch():
    sol = radial_solve(-1.0, 1.0, r_max=12.0)
    r = np.linspace(1e-3, 12.0, 4000)
    v = sol(r)
    inner, outer = np.abs(v[r <= 6]).max(), np.abs(v[r > 6]).max()
    assert outer <= 1.5 * inner
    assert np.count_nonzero(np.diff(np.sign(v[r > 1])) != 0) >= 10


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_series_coefficient(a1, mu):
    # substituting r^2 (1 + beta r^2) at order r^2 gives 8 beta + mu = 0
    v, _, _ = linear._series(1e-2, a1, mu)
    beta = (v / 1e-4 - 1) / 1e-4
    assert beta == pytest.approx(-mu / 8, abs=1e-3)


def test_axis_regularity():
    sol = radial_solve(-1.0, 1.0, r_max=2.0)
    for eps in (1e-3, 1e-5):
        assert sol(eps) / eps**2 == pytest.approx(1.0, abs=10 * eps**2)


def test_mu_shift_gives_identical_radial_factor():
    a = separable(-1.0, -2.0, -1.0, radial="numeric", r_max=5.0)
    b = separable(-1.0, -3.0, -2.0, radial="numeric", r_max=5.0)
    assert a.params["mu"] == b.params["mu"] == 1.0
    r = np.linspace(0.01, 5, 50)
    # z values where both sine factors equal 1
    ra = a.values(r, np.full_like(r, np.pi / 2))[0]
    rb = b.values(r, np.full_like(r, np.pi / (2 * np.sqrt(2))))[0]
    np.testing.assert_allclose(ra, rb, rtol=1e-15)
    assert np.array_equal(radial_solve(-1.0, 1.0, r_max=5.0)(r), radial_solve(-1.0, 1.0, r_max=5.0)(r))


def test_sin_sin_product_converges():
    sol = linear.product_mu0(alpha=1, nu=1, c1=1, c3=1)
    r, z = 1.3, 0.4
    assert sol(r, z) == pytest.approx(math.sin(r * r / 2) * math.sin(z), rel=1e-14)
    spec = GridSpec(0.2, 2.5, -2, 2, 41, 41)
    rep = grid_residual(sample_solution(sol, spec), sol.F, sol.G, refined=sample_solution(sol, spec.refined()))
    assert 1.8 <= rep.order <= 2.2
    assert residual(sol).max_abs <= 1e-12


@pytest.mark.parametrize("a1, b1", [(-1.0, 0.5), (0.0, -2.0), (-2.0, 1.0)])
def test_linear_z_factor(a1, b1):
    sol = separable(a1, b1, 0.0, c3=0.5, c4=2.0, radial="numeric", r_max=3.0)
    assert evaluate(z_factor(0.0, 0.5, 2.0), {"z": 3.0}) == 6.5
    assert residual(sol).max_rel <= 1e-9


def test_fig2_product():
    sol = separable(-1.0, -2.0, -1.0, c3=0.0, c4=1.0, radial="numeric", r_max=6.0)
    assert sol.params["mu"] == 1.0
    assert residual(sol).max_rel <= 1e-9
    r = np.array([0.5, 2.0])
    np.testing.assert_allclose(sol.values(r, np.pi / 3 + 0 * r)[0], 0.5 * sol.values(r, 0 * r)[0], rtol=1e-14)


@pytest.mark.parametrize("a1, mu, h", [(-1.0, 1.0, -1.0), (0.5, -0.5, 0.7), (-2.0, 0.0, -0.3)])
def test_separation_identity(a1, mu, h):
    # with the Hermite second derivative the product residual is Z times the
    # radial residual, so it is bounded by max|Z| times the radial one
    rad = radial_solve(a1, mu, r_max=4.0)
    t = rad.table
    f = Function("Rh", t.w_at, lambda x: (t.w_at(x), t.dw_at(x), t.d2w_at(x)))
    Zexpr = z_factor(h, 1.0, 0.3)
    expr = f(as_expr("r")) * Zexpr
    rng = np.random.default_rng(4)
    r, z = rng.uniform(0.2, 4.0, 300), rng.uniform(-2, 2, 300)
    j = jet_eval(expr, r, z)
    b1 = h - mu
    res = gs_lhs(j, r) - (a1 * r * r + b1) * j.value
    radial_res = np.abs(t.d2w_at(r) - rad.rhs(r, t.w_at(r), t.dw_at(r)))
    Zmax = np.max(np.abs(evaluate(Zexpr, {"z": np.linspace(-2, 2, 401)})))
    assert np.max(np.abs(res)) <= Zmax * radial_res.max() * (1 + 1e-9) + 1e-12


def test_particular_c2():
    sol = particular_solution("c''", a0=2.0, b1=-1.0)
    assert sol(1.5, 0.2) == pytest.approx(2 * 1.5**2)
    assert residual(sol).max_abs <= 1e-12


def test_particular_c3_sin_ci_minus_cos_si():
    sol = particular_solution("c'''", b0=1.0, alpha=1.0)
    rng = np.random.default_rng(8)
    r = rng.uniform(0.2, 3.0, 1000)
    z = rng.uniform(-1, 1, 1000)
    assert residual(sol, points=(r, z)).max_rel <= 1e-8
    from scipy.special import sici

    t = 0.5 * 1.7**2
    si, ci = sici(t)
    assert sol(1.7, 0.0) == pytest.approx(0.5 * (math.sin(t) * ci - math.cos(t) * si), rel=1e-14)


def test_printed_c3_form_fails_residual():
    # the sin*Si variant does not solve the radial equation
    from gssym.catalog import ClosedFormSolution

    good = particular_solution("c'''", b0=1.0, alpha=1.0)
    bad_expr = as_expr(0.5) * (as_expr("sin(r^2/2) * ci(r^2/2) - sin(r^2/2) * si(r^2/2)"))
    bad = ClosedFormSolution("printed", {}, bad_expr, good.F, good.G, good.domain, good.box)
    assert residual(bad).max_rel >= 1e-2


def test_superposition_with_bessel_term():
    psi0 = particular_solution("c''", a0=2.0, b1=-1.0)
    nu = 0.5
    w1 = separable(0.0, -1.0, -nu * nu, c3=0.0, c4=1.0)  # r J1(sqrt(mu) r) cos(nu z), mu = -nu^2 - b1
    assert w1.params["mu"] == pytest.approx(0.75)
    total = superpose(psi0, w1)
    assert residual(total).max_abs <= 1e-12
    assert superpose(psi0).expr == psi0.expr


def test_linear_combination():
    a = separable(-1.0, -1.0, -1.0, c3=1.0)
    b = separable(-1.0, -1.0, 2.0, c3=0.0, c4=1.0, radial="numeric", r_max=3.0)
    s = superpose(a, b)
    assert residual(s).max_rel <= 1e-9


def test_superpose_rejects_mismatch():
    psi0 = particular_solution("c''", a0=2.0, b1=-1.0)
    with pytest.raises(ParameterError):
        superpose(psi0, separable(0.0, -2.0, -1.0))

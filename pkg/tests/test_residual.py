import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gssym import catalog
from gssym.catalog import ClosedFormSolution
from gssym.errors import DomainError, ParameterError
from gssym.expr import as_expr, jet_eval
from gssym.grid import GridField, GridSpec, sample_solution
from gssym.profiles import ProfileSpec
from gssym.residual import PSI_FLOOR, ResidualReport, fd_lhs, grid_residual, gs_lhs, residual


def test_lhs_of_r4():
    assert gs_lhs(jet_eval(as_expr("r^4"), 2.0, 0.3), 2.0) == pytest.approx(32.0, rel=1e-15)


def test_lhs_of_z():
    assert gs_lhs(jet_eval(as_expr("z"), 1.3, 0.7), 1.3) == 0.0


def test_lhs_of_log():
    assert gs_lhs(jet_eval(as_expr("-2*log(r)"), 1.0, 0.0), 1.0) == pytest.approx(4.0, rel=1e-15)


def test_lhs_rejects_axis():
    with pytest.raises(DomainError):
        gs_lhs(jet_eval(as_expr("r^2"), 0.0, 0.0), 0.0)


def test_cyl_quartic_exact():
    assert residual(catalog.instantiate("cyl_quartic", a=4, b=4)).max_abs <= 1e-12


def test_log_cyl_exact_and_negative():
    assert residual(catalog.instantiate("log_cyl", a=2, b=2)).max_abs <= 1e-12
    assert residual(catalog.instantiate("log_cyl", a=2, b=3, strict=False)).max_rel >= 0.1


def test_points_outside_are_reported():
    sol = catalog.instantiate("dshape")
    rep = residual(sol, points=(np.array([0.5, 3.0]), np.array([-0.5, 0.0])))
    assert rep.n_points == 1 and rep.failures == [(3.0, 0.0)]


def test_floor_excludes_small_psi():
    sol = catalog.instantiate("trivial_weak", sigma=-1.0)
    r = np.array([1.0, 1.0, 1.0])
    z = np.array([1.0, 1.0 + 1e-5, 2.0])
    rep = residual(sol, points=(r, z))
    assert rep.excluded == 2 and rep.n_points == 1
    assert PSI_FLOOR == 1e-3


def test_report_json_round_trip():
    rep = residual(catalog.instantiate("sqrt_r"))
    d = json.loads(rep.to_json())
    assert d["n_points"] == rep.n_points and d["max_rel"] == rep.max_rel
    assert isinstance(rep, ResidualReport) and rep.passes(1e-9)


def test_seed_is_reproducible():
    sol = catalog.instantiate("dshape")
    assert residual(sol).to_json() == residual(sol).to_json()
    assert residual(sol, seed=1).to_json() != residual(sol, seed=2).to_json()


def test_r4_grid_residual_second_order():
    sol = catalog.instantiate("cyl_quartic", a=4, b=4)
    spec = GridSpec(0.5, 2.0, -1.0, 1.0, 21, 21)
    rep = grid_residual(sample_solution(sol, spec), sol.F, sol.G, refined=sample_solution(sol, spec.refined()))
    assert rep.order == pytest.approx(2.0, abs=0.05)


def test_noise_floor_is_amplified():
    # documented behaviour: noise eps shows up as ~eps/h^2 in the FD residual
    sol = catalog.instantiate("cyl_quartic", a=4, b=4)
    spec = GridSpec(0.5, 2.0, -1.0, 1.0, 41, 41)
    f = sample_solution(sol, spec)
    noisy = GridField(spec, f.psi + 1e-3 * np.random.default_rng(0).standard_normal(f.psi.shape), f.valid)
    clean, dirty = grid_residual(f, sol.F, sol.G), grid_residual(noisy, sol.F, sol.G)
    assert dirty.max_abs > 100 * clean.max_abs
    assert dirty.max_abs >= 1e-3 / spec.dr**2


def test_fd_needs_five_nodes():
    spec = GridSpec(0.5, 1.0, 0.0, 1.0, 4, 4)
    with pytest.raises(ParameterError):
        fd_lhs(GridField(spec, np.ones((4, 4)), np.ones((4, 4), bool)))


# cond_exp's box straddles the log singularity where sinh(...) = 0
_FD_BOX = {"cond_exp": (0.2, 2.0, -1.0, 0.1)}


@pytest.mark.parametrize("family", catalog.FAMILIES)
def test_jet_and_fd_verdicts_agree(family):
    sol = catalog.instantiate(family)
    assert residual(sol).passes(1e-9)
    spec = GridSpec.from_box(_FD_BOX.get(family, sol.box), 81, 81)
    rep = grid_residual(sample_solution(sol, spec), sol.F, sol.G, refined=sample_solution(sol, spec.refined()))
    # quadratics are differenced exactly, so only round-off is left
    assert rep.max_rel <= 1e-9 or rep.order >= 1.5


@given(st.floats(0.2, 3.0), st.floats(-6.0, -0.05), st.floats(-3.0, -0.1))
def test_dshape_draws_against_weak_profiles(lam, sigma, A):
    from gssym.profiles import weak_family

    F, G, _, _ = weak_family(-0.25, A, sigma)
    sol = catalog.instantiate("dshape", lam=lam, A=A, sigma=sigma)
    assert residual(sol, n=200, F=F, G=G).max_rel <= 1e-9


def test_override_profiles_detect_mismatch():
    sol = catalog.instantiate("dshape")
    assert residual(sol, G=ProfileSpec.power(0.3, -3)).max_rel >= 1e-2

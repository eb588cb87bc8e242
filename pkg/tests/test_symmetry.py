import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gssym import catalog
from gssym.errors import ClassMismatch
from gssym.residual import residual, sample_domain
from gssym.symmetry import (
    SCALE_PSI,
    SCALE_RZ,
    Z_TRANSLATE,
    PointGenerator,
    characteristic,
    commutator,
    exceptional_map,
    exp_case_map,
    generators_equal,
    sample_points,
    scaling_map,
    solution_map,
    x1,
    x1_shifted,
    x2,
    x_exceptional,
    y_cond_kappa,
    y_rot,
    y_weak,
)

BUILTINS = [Z_TRANSLATE, SCALE_PSI, SCALE_RZ, x1(1), x1(Fraction(-1, 4)), x1_shifted(Fraction(-1, 4), 1),
            x_exceptional(0), x_exceptional(1), x2(2), y_cond_kappa(1.5), y_rot(), y_weak(-1)]
ZERO = PointGenerator("0", 0, 0, 0)


def test_exceptional_commutator():
    assert generators_equal(commutator(x1(Fraction(-1, 4)), x_exceptional(0)), x_exceptional(0), n=50, atol=1e-10)


def test_translation_bracket():
    got = commutator(Z_TRANSLATE, x_exceptional(0))
    r, z, psi = sample_points(50, seed=3)
    xr, xz, eta = got(r, z, psi)
    np.testing.assert_allclose(xr, 2 * r, atol=1e-12)
    np.testing.assert_allclose(xz, 2 * z, atol=1e-12)
    np.testing.assert_allclose(eta, psi, atol=1e-12)
    assert generators_equal(got, x1(Fraction(-1, 4)).scaled(2))


@pytest.mark.parametrize("v", BUILTINS, ids=lambda g: g.label)
def test_self_bracket_vanishes(v):
    assert generators_equal(commutator(v, v), ZERO)


def test_jacobi_identity():
    r, z, psi = sample_points(50, seed=11)
    for u, v, w in itertools.combinations(BUILTINS[:9], 3):
        total = commutator(u, commutator(v, w)) + commutator(v, commutator(w, u)) + commutator(w, commutator(u, v))
        for comp in total(r, z, psi):
            assert np.max(np.abs(comp)) <= 1e-9


def test_conditional_generators_have_no_map():
    sol = catalog.instantiate("cond_parabolic")
    for g in (y_cond_kappa(1), y_rot(), y_weak(2)):
        with pytest.raises(TypeError):
            solution_map(g, sol, 0.5)


def _pts(sol, n=1000, seed=2):
    return sample_domain(sol, n, seed)


def test_scaling_identity_at_zero():
    sol = catalog.instantiate("weak_power", q=1.0, A=0.3, sigma=3.0)
    img = scaling_map(sol, 0.0)
    r, z = _pts(sol)
    np.testing.assert_allclose(img(r, z), sol(r, z), rtol=1e-15)


@pytest.mark.parametrize("lam", [-0.7, 0.4, 1.3])
def test_r4_is_scaling_fixed_point(lam):
    sol = catalog.instantiate("cyl_quartic", a=4, b=4)
    img = scaling_map(sol, lam, q=-2)
    r, z = _pts(img, 200)
    np.testing.assert_allclose(img(r, z), sol(r, z), rtol=1e-13)


def test_scaling_rejects_wrong_class():
    with pytest.raises(ClassMismatch):
        scaling_map(catalog.instantiate("log_cyl"), 0.2)
    with pytest.raises(ClassMismatch):
        scaling_map(catalog.instantiate("weak_power", q=1.0, A=0.3, sigma=3.0), 0.2, q=2)
    with pytest.raises(ClassMismatch):
        exceptional_map(catalog.instantiate("weak_power", q=1.0, A=0.3, sigma=3.0), 0.2)
    with pytest.raises(ClassMismatch):
        exp_case_map(catalog.instantiate("cyl_quartic"), 0.2)


def test_exceptional_identity_at_zero():
    sol = catalog.instantiate("dshape", lam=1, A=-1, sigma=-1)
    img = exceptional_map(sol, 0.0)
    r, z = _pts(sol)
    np.testing.assert_allclose(img(r, z), sol(r, z), rtol=1e-15)


def test_exceptional_map_of_seed_is_dshape():
    seed = catalog.instantiate("weak_power", q=-0.25, A=-1.0, sigma=-1.0)
    ref = catalog.instantiate("dshape", lam=1.0, A=-1.0, sigma=-1.0)
    img = exceptional_map(seed, 1.0)
    r, z = _pts(ref)
    assert np.all(img.inside(r, z))
    np.testing.assert_allclose(img(r, z), ref(r, z), rtol=1e-12)


@pytest.mark.parametrize("lam", [-0.3, 0.5, 2.0])
def test_sqrt_r_is_exceptional_fixed_point(lam):
    sol = catalog.instantiate("sqrt_r", a=-0.75, b=0)
    img = exceptional_map(sol, lam)
    r, z = _pts(img, 300)
    np.testing.assert_allclose(img(r, z), sol(r, z), rtol=1e-13)


@given(st.floats(-0.4, 0.4), st.floats(-0.4, 0.4))
def test_exceptional_group_property(l1, l2):
    sol = catalog.instantiate("dshape", lam=1, A=-1, sigma=-1)
    two = exceptional_map(exceptional_map(sol, l1), l2)
    one = exceptional_map(sol, l1 + l2)
    r, z = sample_domain(one, 400, seed=9)
    keep = two.inside(r, z)
    assert keep.sum() >= 100
    np.testing.assert_allclose(two(r[keep], z[keep]), one(r[keep], z[keep]), rtol=1e-10)


def test_exceptional_map_with_shift():
    sol = catalog.instantiate("sqrt_r", a=-0.75, b=0)
    shifted = catalog.ClosedFormSolution("shifted", {}, sol.expr - 1, *_shifted_profiles(sol), sol.domain, sol.box)
    img = exceptional_map(shifted, 0.3)
    assert residual(img).max_rel <= 1e-9


def _shifted_profiles(sol):
    from gssym.profiles import ProfileSpec
    # psi -> psi - 1 moves the profiles to (psi + 1)
    return ProfileSpec.power(-0.75, -7, 1, role="F"), ProfileSpec.zero("G")


@pytest.mark.parametrize("lam", [-0.5, 0.0, 0.8])
def test_log_r_is_exp_fixed_point(lam):
    sol = catalog.instantiate("log_cyl", a=2, b=2)
    img = exp_case_map(sol, lam)
    r, z = _pts(img, 300)
    np.testing.assert_allclose(img(r, z), sol(r, z), rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("family, mapper, lam", [
    ("dshape", exceptional_map, 0.3), ("dshape", exceptional_map, -0.2), ("sqrt_r", exceptional_map, 1.0),
    ("weak_power", scaling_map, 0.4), ("cyl_quartic", scaling_map, -0.6), ("dshape", scaling_map, 0.25),
    ("rot_power", scaling_map, 0.5), ("log_cyl", exp_case_map, 0.7), ("dshape_complement", exceptional_map, 0.2),
])
def test_maps_preserve_residual(family, mapper, lam):
    sol = catalog.instantiate(family)
    img = mapper(sol, lam)
    assert residual(img).max_rel <= 1e-9
    assert img.F == sol.F and img.G == sol.G


@pytest.mark.parametrize("lam", [-0.5, 0.3, 1.0])
def test_x_exceptional_invariance_survives_scaling(lam):
    sol = catalog.instantiate("sqrt_r", a=-0.75, b=0)
    img = scaling_map(sol, lam)
    r, z = _pts(img, 200)
    assert np.max(np.abs(characteristic(x_exceptional(0), img, r, z))) <= 1e-9


def test_generator_text_and_apply():
    g = x_exceptional(0)
    assert "psi" in g.text()
    assert generators_equal(g.scaled(2) - g, g)

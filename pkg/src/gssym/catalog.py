"""Closed-form Grad-Shafranov solution families.

Each family builds a :class:`ClosedFormSolution`: the flux function as an
expression tree in ``(r, z)``, the profile pair ``(F, G)`` it solves, an
explicit domain predicate and a sampling box.  Family constraints that
tie profile constants to solution constants are solved (or checked) at
instantiation time.

Family names are stable strings used by the command line and config
files; see :data:`FAMILIES`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import ConstraintError, DomainError, ParameterError
from .expr import FUNCTIONS, R, Z, Expr, as_expr, evaluate, jet_eval, simplify, to_text
from .jets import ScalarJet
from .profiles import ProfileSpec, _exact, canonicalize, dshape_params_from, weak_coefficients

CONSTRAINT_TOL = 1e-12


class Family(str, Enum):
    CYL_QUARTIC = "cyl_quartic"
    SQRT_R = "sqrt_r"
    LOG_CYL = "log_cyl"
    COND_PARABOLIC = "cond_parabolic"
    COND_EXP = "cond_exp"
    ROT_POWER = "rot_power"
    WEAK_POWER = "weak_power"
    TRIVIAL_WEAK = "trivial_weak"
    WEAK_QUAD = "weak_quad"
    WEAK_CUBIC = "weak_cubic"
    DSHAPE = "dshape"
    DSHAPE_COMPLEMENT = "dshape_complement"


FAMILIES = tuple(f.value for f in Family)

# families carrying a sigma parameter for the sigma -> 1 - sigma partner
SIGMA_FAMILIES = {Family.WEAK_POWER, Family.TRIVIAL_WEAK, Family.WEAK_QUAD, Family.WEAK_CUBIC}


@dataclass(frozen=True, eq=False)
class ClosedFormSolution:
    family: str
    params: dict
    expr: Expr
    F: ProfileSpec
    G: ProfileSpec
    domain: Callable = field(repr=False)
    box: tuple = (0.1, 2.0, -1.0, 1.0)
    note: str = ""

    def inside(self, r, z):
        r = np.asarray(r, dtype=float)
        z = np.asarray(z, dtype=float)
        with np.errstate(all="ignore"):
            return np.asarray(self.domain(r, z), dtype=bool) & (r > 0)

    def _check(self, r, z):
        if not np.all(self.inside(r, z)):
            raise DomainError(f"point outside the domain of {self.family}")

    def jet(self, r, z) -> ScalarJet:
        """Value and exact partials of psi at (r, z) (scalars or arrays)."""
        self._check(r, z)
        return jet_eval(self.expr, r, z)

    def __call__(self, r, z):
        self._check(r, z)
        out = evaluate(self.expr, {"r": _arr(r), "z": _arr(z)})
        return out if np.ndim(out) else float(out)

    def values(self, r, z, fill=np.nan):
        """psi on arrays, ``fill`` outside the domain (no exception)."""
        r, z = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(z, dtype=float))
        mask = self.inside(r, z)
        out = np.full(r.shape, fill, dtype=float)
        if np.any(mask):
            out[mask] = evaluate(self.expr, {"r": r[mask], "z": z[mask]})
        return out, mask

    @property
    def formula(self) -> str:
        return to_text(self.expr)

    def with_params(self, **changes):
        return replace(self, params={**self.params, **changes})


def _arr(x):
    return np.asarray(x, dtype=float) if np.ndim(x) else float(x)


# --------------------------------------------------------------------------
# real-root isolation
# --------------------------------------------------------------------------


def real_roots(f, lo=-1e6, hi=1e6, n=4000):
    """All sign-change roots of ``f`` on ``[lo, hi]``, located by bracketing
    on a symmetric log-spaced grid and refined by Brent's method."""
    mags = np.logspace(-8, np.log10(max(abs(lo), abs(hi))), n // 2)
    grid = np.unique(np.concatenate([-mags[::-1], [0.0], mags]))
    grid = grid[(grid >= lo) & (grid <= hi)]
    vals = np.array([f(x) for x in grid])
    roots = []
    for i in range(len(grid) - 1):
        a, b, fa, fb = grid[i], grid[i + 1], vals[i], vals[i + 1]
        if fa == 0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
    if vals[-1] == 0:
        roots.append(float(grid[-1]))
    return sorted(set(roots))


def _check_constraint(name, residual, scale, strict):
    if strict and abs(residual) > CONSTRAINT_TOL * max(scale, 1.0):
        raise ConstraintError(f"{name}: constraint violated (residual {residual:.3e})")


def _num(params, key, default=None):
    if key in params and params[key] is not None:
        return float(params[key])
    if default is None:
        raise ParameterError(f"missing parameter {key!r}")
    return float(default)


def _scaled(spec: ProfileSpec, scale: float, role: str) -> ProfileSpec:
    if scale == 1.0 or spec.form == "zero":
        return spec
    return _from_expr(as_expr(scale) * spec.expr, role)


def _from_expr(e: Expr, role):
    return canonicalize(simplify(e), role)


# --------------------------------------------------------------------------
# families
# --------------------------------------------------------------------------


def _cyl_quartic(p, strict):
    a, b = _num(p, "a"), _num(p, "b")
    if p.get("A") is None:
        roots = [x for x in real_roots(lambda A: 8 * A * A - a - b * A) if x >= 0]
        if not roots:
            raise ConstraintError(f"cyl_quartic: 8A^2 = a + bA has no root with A >= 0 for a={a}, b={b}")
        A = max(roots)
    else:
        A = float(p["A"])
    # G = b psi^(1/2) uses the principal root, |A| r^2
    _check_constraint("cyl_quartic 8A^2 = a + b|A|", 8 * A * A - a - b * abs(A), max(8 * A * A, abs(a), abs(b * A)), strict)
    expr = as_expr(A * A) * R**4
    F = ProfileSpec.affine(a, 0, "F")
    G = ProfileSpec.power(b, Fraction(1, 2), role="G") if b != 0 else ProfileSpec.zero("G")
    return dict(a=a, b=b, A=A), expr, F, G, (lambda r, z: r > 0), (0.1, 2.0, -1.0, 1.0)


def _sqrt_r(p, strict):
    a, b, A = p.get("a"), p.get("b"), p.get("A")
    if A is None:
        a, b = float(a), float(b)
        roots = [x for x in real_roots(lambda A: 3 * A**8 + 4 * a + 4 * b * A**4) if x > 0]
        if not roots:
            raise ConstraintError(f"sqrt_r: 3A^8 + 4a + 4bA^4 = 0 has no positive root for a={a}, b={b}")
        A = max(roots)
    else:
        A = float(A)
        if A == 0:
            raise ParameterError("sqrt_r: A must be non-zero")
        if a is None:
            b = float(b)
            a = -(3 * A**8 + 4 * b * A**4) / 4
        elif b is None:
            a = float(a)
            b = -(3 * A**8 + 4 * a) / (4 * A**4)
        a, b = float(a), float(b)
    _check_constraint("sqrt_r 3A^8 + 4a + 4bA^4 = 0", 3 * A**8 + 4 * a + 4 * b * A**4, max(3 * A**8, abs(4 * a), abs(4 * b * A**4)), strict)
    expr = as_expr(A) * FUNCTIONS["sqrt"](R)
    F = ProfileSpec.power(a, -7, role="F") if a != 0 else ProfileSpec.zero("F")
    G = ProfileSpec.power(b, -3, role="G") if b != 0 else ProfileSpec.zero("G")
    return dict(a=a, b=b, A=A), expr, F, G, (lambda r, z: r > 0), (0.1, 3.0, -2.0, 2.0)


def _log_cyl(p, strict):
    a = _num(p, "a")
    b = _num(p, "b", 4.0 - a)
    _check_constraint("log_cyl a + b = 4", a + b - 4.0, 4.0, strict)
    expr = -2 * FUNCTIONS["log"](R)
    F = ProfileSpec.exponential(a, 2, "F") if a != 0 else ProfileSpec.zero("F")
    G = ProfileSpec.exponential(b, 1, "G") if b != 0 else ProfileSpec.zero("G")
    return dict(a=a, b=b), expr, F, G, (lambda r, z: r > 0), (0.2, 3.0, -1.0, 1.0)


def _cond_parabolic(p, strict):
    kappa, c = _num(p, "kappa", 1.0), _num(p, "c", 0.0)
    expr = FUNCTIONS["sqrt"](R**2 - as_expr(2 * kappa) * Z + as_expr(c))
    F = ProfileSpec.power(-1, -3, role="F")
    G = ProfileSpec.power(-kappa * kappa, -3, role="G")
    dom = lambda r, z: r * r - 2 * kappa * z + c > 0  # noqa: E731
    return dict(kappa=kappa, c=c), expr, F, G, dom, (0.2, 2.0, -2.0, 0.0 if kappa > 0 else 2.0)


def _cond_exp(p, strict):
    c, c0, kappa = _num(p, "c", 1.0), _num(p, "c0", 0.5), _num(p, "kappa", 1.0)
    if c == 0:
        raise ParameterError("cond_exp: c must be non-zero")
    u = as_expr(c) * R**2 - as_expr(2 * c * kappa) * Z + as_expr(c0)
    expr = FUNCTIONS["log"](as_expr(8 * c * c) / FUNCTIONS["sinh"](u) ** 2)
    F = ProfileSpec.exponential(1, 1, "F")
    G = ProfileSpec.exponential(kappa * kappa, 1, "G")
    dom = lambda r, z: np.abs(c * r * r - 2 * c * kappa * z + c0) > 1e-8  # noqa: E731
    return dict(c=c, c0=c0, kappa=kappa), expr, F, G, dom, (0.2, 2.0, -1.0, 1.0)


def _rot_power(p, strict):
    b, beta = _num(p, "b"), _num(p, "beta")
    if beta in (1.0, -1.0):
        raise ParameterError("rot_power: beta must differ from +1 and -1")
    gamma = 1.0 / (1.0 - beta)
    base = b / (4 * gamma * gamma - 2 * gamma)
    if p.get("A") is None:
        if base <= 0 and not float(gamma).is_integer():
            raise ConstraintError(f"rot_power: b/(4 gamma^2 - 2 gamma) = {base} must be positive")
        A = base**gamma
    else:
        A = float(p["A"])
    _check_constraint(
        "rot_power A^(1-beta)(4 gamma^2 - 2 gamma) = b",
        A * (4 * gamma * gamma - 2 * gamma) - b * np.power(A, beta) if A > 0 else np.inf,
        abs(b * np.power(abs(A), beta)), strict,
    )
    expr = as_expr(A) * (R**2 + Z**2) ** as_expr(gamma)
    G = ProfileSpec.power(b, beta, role="G")
    return dict(b=b, beta=beta, gamma=gamma, A=A), expr, ProfileSpec.zero("F"), G, \
        (lambda r, z: r * r + z * z > 0), (0.2, 2.0, -1.5, 1.5)


def _weak_power(p, strict):
    q, sigma = _num(p, "q"), _num(p, "sigma")
    if sigma in (0.0, 1.0):
        raise ParameterError(f"weak_power: degenerate sigma={sigma}")
    if q == 0:
        raise ParameterError("weak_power: q must be non-zero")
    if p.get("A") is None:
        a, b = _num(p, "a"), _num(p, "b")
        m = 4 * (sigma * sigma - sigma) * q * (q + 1)
        if 2 * q + 1 != 0:
            A = b / (2 * q * (2 * q + 1))
        else:
            if m == 0 or a / m <= 0:
                raise ConstraintError("weak_power: a = 4A^2(sigma^2 - sigma)q(q+1) has no real A")
            A = math.sqrt(a / m)
            if sigma < 0:
                A = -A  # keeps A(sigma r^2 + z^2) > 0 near the mid-plane
    else:
        A = _num(p, "A")
    a_ok, b_ok = (float(v) for v in weak_coefficients(q, A, sigma))
    a = _num(p, "a", a_ok) if "a" in p else a_ok
    b = _num(p, "b", b_ok) if "b" in p else b_ok
    _check_constraint("weak_power a = 4A^2(sigma^2-sigma)q(q+1)", a - a_ok, abs(a_ok), strict)
    _check_constraint("weak_power b = 2Aq(2q+1)", b - b_ok, abs(b_ok), strict)
    if A == 0:
        raise ConstraintError("weak_power: A = 0")
    s = as_expr(sigma) * R**2 + Z**2
    expr = (as_expr(A) * s) ** as_expr(-q)
    qe = _exact(q)
    pF = 1 + (Fraction(2) / qe if isinstance(qe, Fraction) else 2.0 / q)
    pG = 1 + (Fraction(1) / qe if isinstance(qe, Fraction) else 1.0 / q)
    F = ProfileSpec.power(a, pF, role="F") if a != 0 else ProfileSpec.zero("F")
    G = ProfileSpec.power(b, pG, role="G") if b != 0 else ProfileSpec.zero("G")
    dom = lambda r, z: A * (sigma * r * r + z * z) > 0  # noqa: E731
    return dict(q=q, A=A, sigma=sigma, a=a, b=b), expr, F, G, dom, (0.1, 2.0, -2.0, 2.0)


def _trivial_weak(p, strict):
    sigma = _num(p, "sigma", -1.0)
    expr = as_expr(sigma) * R**2 + Z**2
    return dict(sigma=sigma), expr, ProfileSpec.zero("F"), ProfileSpec.affine(2, 0, "G"), \
        (lambda r, z: np.ones_like(r, dtype=bool)), (0.1, 2.0, -1.0, 1.0)


def _sigma_pm(p, family):
    sigma = _num(p, "sigma", 2.0)
    if sigma * sigma - sigma != 2.0:
        raise ParameterError(f"{family}: sigma must satisfy sigma^2 - sigma = 2 (sigma = 2 or -1)")
    sign = _num(p, "sign", 1.0)
    if sign not in (1.0, -1.0):
        raise ParameterError(f"{family}: sign must be +1 or -1")
    alpha = _num(p, "alpha", 1.0)
    if alpha <= 0:
        raise ParameterError(f"{family}: alpha must be positive")
    s_expr = as_expr(sigma) * R**2 + Z**2
    # with sigma = -1 the |psi| profiles match only where s = z^2 - r^2 > 0
    dom = (lambda r, z: sigma * r * r + z * z > 0) if sigma < 0 else (lambda r, z: np.ones_like(r, dtype=bool))
    return sigma, sign, alpha, s_expr, dom


def _weak_quad(p, strict):
    sigma, sign, alpha, s, dom = _sigma_pm(p, "weak_quad")
    expr = as_expr(sign * alpha * alpha / 16) * s**2
    F = ProfileSpec.affine(sign * alpha * alpha, 0, "F")
    G = _from_expr(as_expr(sign * 3 * alpha) * FUNCTIONS["abs"](as_expr("psi")) ** as_expr(Fraction(1, 2)), "G")
    box = (0.1, 2.0, -2.0, 2.0)
    return dict(sigma=sigma, sign=sign, alpha=alpha), expr, F, G, dom, box


def _weak_cubic(p, strict):
    sigma, sign, alpha, s, dom = _sigma_pm(p, "weak_cubic")
    k = alpha**3 / (192 * math.sqrt(3))
    expr = as_expr(sign * k) * s**3
    abspsi = FUNCTIONS["abs"](as_expr("psi"))
    F = _from_expr(as_expr(sign * alpha * alpha) * abspsi ** as_expr(Fraction(1, 3)), "F")
    G = _from_expr(as_expr(sign * 15 * alpha / (2 * math.sqrt(3))) * abspsi ** as_expr(Fraction(2, 3)), "G")
    return dict(sigma=sigma, sign=sign, alpha=alpha), expr, F, G, dom, (0.1, 2.0, -2.0, 2.0)


def dshape_geometry(lam, sigma, shift_z0=False):
    """Centres and common radius of the two circles bounding the D-shape."""
    r0 = math.sqrt(abs(sigma)) / (2 * lam)
    z0 = 0.0 if shift_z0 else -1.0 / (2 * lam)
    radius = math.sqrt(1 + abs(sigma)) / (2 * lam)
    return (r0, z0), (-r0, z0), radius


def _dshape_common(p, family):
    lam = _num(p, "lam", 1.0)
    if lam <= 0:
        raise ParameterError(f"{family}: lambda must be positive")
    shift = bool(p.get("shift_z0", False))
    if p.get("A") is None and p.get("a") is not None:
        A, sigma = dshape_params_from(_num(p, "a"), _num(p, "b"))
        if family == "dshape_complement":
            A = -A
    else:
        A = _num(p, "A", -1.0 if family == "dshape" else 1.0)
        sigma = _num(p, "sigma", -1.0)
    return lam, shift, A, sigma


def _dshape_expr(A, sigma, lam, shift):
    z = Z - as_expr(1 / (2 * lam)) if shift else Z
    rho2 = R**2 + z**2
    w = z + as_expr(lam) * rho2
    if A < 0:
        inner = as_expr(A * sigma) * R**2 - as_expr(abs(A)) * w**2
    else:
        inner = as_expr(A * sigma) * R**2 + as_expr(A) * w**2
    dz = 1 / (2 * lam) if shift else 0.0

    def inner_value(r, z):
        zz = z - dz
        ww = zz + lam * (r * r + zz * zz)
        return A * sigma * r * r + A * ww * ww

    return inner ** as_expr(Fraction(1, 4)), inner_value


def _dshape(p, strict):
    lam, shift, A, sigma = _dshape_common(p, "dshape")
    if sigma >= 0 or A >= 0:
        raise ParameterError(f"dshape requires sigma < 0 and A < 0 (got sigma={sigma}, A={A})")
    expr, inner = _dshape_expr(A, sigma, lam, shift)
    a, b = (float(v) for v in weak_coefficients(Fraction(-1, 4), A, sigma))
    F = ProfileSpec.power(a, -7, role="F")
    G = ProfileSpec.power(b, -3, role="G")
    (r0, z0), _, rad = dshape_geometry(lam, sigma, shift)
    box = (max(1e-6, r0 - rad), r0 + rad, z0 - rad, z0 + rad)
    params = dict(lam=lam, A=A, sigma=sigma, a=a, b=b, shift_z0=shift)
    return params, expr, F, G, (lambda r, z: inner(r, z) > 0), box, inner


def _dshape_complement(p, strict):
    lam, shift, A, sigma = _dshape_common(p, "dshape_complement")
    if sigma >= 0 or A <= 0:
        raise ParameterError(f"dshape_complement requires sigma < 0 and A > 0 (got sigma={sigma}, A={A})")
    expr, inner = _dshape_expr(A, sigma, lam, shift)
    a, b = (float(v) for v in weak_coefficients(Fraction(-1, 4), A, sigma))
    F = ProfileSpec.power(a, -7, role="F")
    G = ProfileSpec.power(b, -3, role="G")
    (r0, z0), _, rad = dshape_geometry(lam, sigma, shift)
    box = (1e-3, r0 + 2 * rad, z0 - 2 * rad, z0 + 2 * rad)
    params = dict(lam=lam, A=A, sigma=sigma, a=a, b=b, shift_z0=shift)
    return params, expr, F, G, (lambda r, z: inner(r, z) > 0), box, inner


_BUILDERS = {
    Family.CYL_QUARTIC: _cyl_quartic,
    Family.SQRT_R: _sqrt_r,
    Family.LOG_CYL: _log_cyl,
    Family.COND_PARABOLIC: _cond_parabolic,
    Family.COND_EXP: _cond_exp,
    Family.ROT_POWER: _rot_power,
    Family.WEAK_POWER: _weak_power,
    Family.TRIVIAL_WEAK: _trivial_weak,
    Family.WEAK_QUAD: _weak_quad,
    Family.WEAK_CUBIC: _weak_cubic,
    Family.DSHAPE: _dshape,
    Family.DSHAPE_COMPLEMENT: _dshape_complement,
}

# Parameters reproducing the instances printed alongside each family.
DEFAULT_PARAMS = {
    "cyl_quartic": dict(a=4.0, b=4.0),
    "sqrt_r": dict(a=-0.75, b=0.0),
    "log_cyl": dict(a=2.0, b=2.0),
    "cond_parabolic": dict(kappa=1.0, c=0.0),
    "cond_exp": dict(c=1.0, c0=0.5, kappa=1.0),
    "rot_power": dict(b=8.0, beta=3.0),
    "weak_power": dict(q=-0.5, sigma=2.0, a=-1.0, b=0.0),
    "trivial_weak": dict(sigma=-1.0),
    "weak_quad": dict(alpha=1.0, sigma=2.0, sign=1.0),
    "weak_cubic": dict(alpha=1.0, sigma=2.0, sign=1.0),
    "dshape": dict(lam=1.0, A=-1.0, sigma=-1.0),
    "dshape_complement": dict(lam=1.0, A=1.0, sigma=-1.0),
}


def instantiate(family, params=None, strict=True, **kw) -> ClosedFormSolution:
    """Build a solution of ``family``.

    ``params`` (or keyword arguments) supply the family constants; missing
    constants tied by a constraint are solved for, and with no constants
    at all the :data:`DEFAULT_PARAMS` instance is built.  With ``strict`` the
    constraint residual must be at most 1e-12 relative, otherwise a
    :class:`ConstraintError` is raised.  ``F_scale`` and ``G_scale``
    multiply the stored profiles and, when different from 1, break the
    solution on purpose (negative controls; requires ``strict=False``).
    """
    fam = Family(family)
    p = dict(params or {})
    p.update(kw)
    if not p:
        p = dict(DEFAULT_PARAMS[fam.value])
    f_scale = float(p.pop("F_scale", 1.0))
    g_scale = float(p.pop("G_scale", 1.0))
    if strict and (f_scale != 1.0 or g_scale != 1.0):
        raise ConstraintError("profile scaling breaks the solution; pass strict=False")
    out = _BUILDERS[fam](p, strict)
    inner = None
    if len(out) == 7:
        params, expr, F, G, dom, box, inner = out
    else:
        params, expr, F, G, dom, box = out
    F = _scaled(F, f_scale, "F")
    G = _scaled(G, g_scale, "G")
    if f_scale != 1.0 or g_scale != 1.0:
        params = dict(params, F_scale=f_scale, G_scale=g_scale)
    sol = ClosedFormSolution(fam.value, params, expr, F, G, dom, box)
    if inner is not None:
        object.__setattr__(sol, "inner", inner)
    return sol


def constraint_roots(family, **params):
    """All real roots of the constraint polynomial of cyl_quartic/sqrt_r."""
    fam = Family(family)
    a, b = float(params["a"]), float(params["b"])
    if fam is Family.CYL_QUARTIC:
        return real_roots(lambda A: 8 * A * A - a - b * A)
    if fam is Family.SQRT_R:
        return real_roots(lambda A: 3 * A**8 + 4 * a + 4 * b * A**4)
    raise ParameterError(f"{family} has no polynomial constraint")


def doubling_partner(s: ClosedFormSolution) -> ClosedFormSolution:
    """Same weak family with sigma -> 1 - sigma (profiles unchanged)."""
    fam = Family(s.family)
    if fam not in SIGMA_FAMILIES:
        raise ParameterError(f"{s.family} is not a sigma-parameterised weak family")
    p = {k: v for k, v in s.params.items() if k not in ("F_scale", "G_scale")}
    p["sigma"] = 1.0 - float(p["sigma"])
    if fam is Family.WEAK_POWER:
        p = dict(q=p["q"], A=p["A"], sigma=p["sigma"])
    out = instantiate(fam, p)
    # the partner solves the same pair; keep the exact profile objects
    # rather than ones re-derived through floating point
    for mine, theirs in ((out.F, s.F), (out.G, s.G)):
        x = np.linspace(0.5, 2.0, 7)
        if not np.allclose(mine.canonical_value(x), theirs.canonical_value(x), rtol=1e-12, atol=1e-14):
            raise ParameterError("doubling changed the profiles")
    return replace(out, F=s.F, G=s.G)


@dataclass(frozen=True)
class Circle:
    center: tuple
    radius: float

    def distance(self, r, z):
        """Signed distance to the circle (negative inside)."""
        return np.hypot(np.asarray(r) - self.center[0], np.asarray(z) - self.center[1]) - self.radius

    def sample(self, n):
        t = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        return self.center[0] + self.radius * np.cos(t), self.center[1] + self.radius * np.sin(t)


def dshape_boundary(s: ClosedFormSolution):
    """The two circles on which the D-shape flux vanishes (right, left)."""
    if s.family not in ("dshape", "dshape_complement"):
        raise ParameterError(f"{s.family} is not a D-shape family")
    right, left, rad = dshape_geometry(s.params["lam"], s.params["sigma"], s.params["shift_z0"])
    return Circle(right, rad), Circle(left, rad)

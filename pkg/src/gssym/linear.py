"""The linear case: profiles ``F = a1 psi + a0`` and ``G = b1 psi + b0``.

Separable solutions ``psi = R(r) Z(z)`` with ``Z'' = h Z`` need the
radial equation

    R'' - R'/r + mu R = a1 r^2 R,      mu = h - b1,

whose axis-regular branch is normalised so that ``R/r^2 -> 1`` at the
axis.  Inhomogeneous cases add a particular solution; any solution of
the homogeneous equation can then be superposed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalog import ClosedFormSolution
from .errors import DomainError, ParameterError
from .expr import FUNCTIONS, R, Z, Expr, Function, as_expr, simplify
from .ode import ODESolutionTable, dopri5
from .profiles import ProfileSpec

EPS_AXIS = 1e-4
R_MAX = 50.0


def _series(r, a1, mu):
    """Axis series ``r^2 - (mu/8) r^4 + ((a1 + mu^2/8)/24) r^6`` and its
    first two derivatives."""
    c4 = -mu / 8
    c6 = (a1 + mu * mu / 8) / 24
    v = r**2 + c4 * r**4 + c6 * r**6
    d1 = 2 * r + 4 * c4 * r**3 + 6 * c6 * r**5
    d2 = 2 + 12 * c4 * r**2 + 30 * c6 * r**4
    return v, d1, d2


@dataclass
class RadialSolution:
    """Axis-regular radial branch for ``(a1, mu)``.

    ``table`` holds the numeric branch on ``[EPS_AXIS, r_max]``;
    ``closed_form`` is an expression in ``r`` for the normalised branch
    when one exists (``None`` otherwise).
    """

    a1: float
    mu: float
    table: ODESolutionTable
    closed_form: Expr | None = None

    @property
    def r_max(self):
        return self.table.span[1]

    def rhs(self, r, R_, dR):
        return dR / r - self.mu * R_ + self.a1 * r * r * R_

    def derivs(self, r):
        r = np.asarray(r, dtype=float)
        lo, hi = self.table.span
        if np.any(r > hi * (1 + 1e-12)) or np.any(r < 0):
            raise DomainError(f"radial table covers [0, {hi}]")
        rc = np.clip(r, lo, hi)
        v, d1 = self.table.w_at(rc), self.table.dw_at(rc)
        with np.errstate(all="ignore"):
            d2 = self.rhs(rc, v, d1)
        sv, s1, s2 = _series(r, self.a1, self.mu)
        near = r < lo
        out = [np.where(near, a, b) for a, b in ((sv, v), (s1, d1), (s2, d2))]
        return tuple(o if o.ndim else float(o) for o in out)

    def __call__(self, r):
        return self.derivs(r)[0]

    def as_function(self) -> Function:
        return Function(f"R_{self.a1:g}_{self.mu:g}", self, self.derivs, self._check)

    def _check(self, r):
        if np.any(np.asarray(r) > self.r_max * (1 + 1e-12)) or np.any(np.asarray(r) < 0):
            raise DomainError(f"radial table covers [0, {self.r_max}]")


def radial_closed_form(a1, mu) -> Expr | None:
    """Normalised closed form of the regular branch where one is known."""
    if a1 == 0 and mu > 0:
        k = math.sqrt(mu)
        return as_expr(2 / k) * R * FUNCTIONS["j1"](as_expr(k) * R)
    if a1 == 0 and mu == 0:
        return R**2
    if mu == 0 and a1 < 0:
        alpha = math.sqrt(-a1)
        return as_expr(2 / alpha) * FUNCTIONS["sin"](as_expr(alpha / 2) * R**2)
    if mu == 0 and a1 > 0:
        alpha = math.sqrt(a1)
        return as_expr(2 / alpha) * FUNCTIONS["sinh"](as_expr(alpha / 2) * R**2)
    return None


def radial_solve(a1, mu, r_max=10.0, tol=1e-12) -> RadialSolution:
    """Regular radial branch from the series start at ``r = 1e-4``."""
    a1, mu = float(a1), float(mu)
    if not 0 < r_max <= R_MAX:
        raise ParameterError(f"r_max must lie in (0, {R_MAX}]")
    v, d1, _ = _series(EPS_AXIS, a1, mu)

    def f(r, u):
        return np.array([u[1], u[1] / r - mu * u[0] + a1 * r * r * u[0]])

    ys, us, info = dopri5(f, EPS_AXIS, [v, d1], r_max, rtol=tol, atol=tol * EPS_AXIS**2, max_step=r_max / 400)
    d2 = us[:, 1] / ys - mu * us[:, 0] + a1 * ys * ys * us[:, 0]
    table = ODESolutionTable(ys, us[:, 0], us[:, 1], d2, dict(info, a1=a1, mu=mu, tol=tol))
    return RadialSolution(a1, mu, table, radial_closed_form(a1, mu))


def radial_basis(a1, mu):
    """Both closed-form radial solutions ``(regular, second)`` or ``None``.

    ``a1 = 0, mu > 0``: ``r J1(sqrt(mu) r)`` and ``r Y1(sqrt(mu) r)``;
    ``mu = 0, a1 = -alpha^2``: ``sin(alpha r^2/2)`` and ``cos(alpha r^2/2)``;
    ``a1 = mu = 0``: ``r^2`` and ``1``.
    """
    if a1 == 0 and mu > 0:
        k = as_expr(math.sqrt(mu))
        return R * FUNCTIONS["j1"](k * R), R * FUNCTIONS["y1"](k * R)
    if mu == 0 and a1 < 0:
        half = as_expr(math.sqrt(-a1) / 2)
        return FUNCTIONS["sin"](half * R**2), FUNCTIONS["cos"](half * R**2)
    if a1 == 0 and mu == 0:
        return R**2, as_expr(1)
    return None


# --------------------------------------------------------------------------
# separable products
# --------------------------------------------------------------------------


def z_factor(h, c3=1.0, c4=0.0) -> Expr:
    """Solution of ``Z'' = h Z``: trigonometric, hyperbolic or linear."""
    if h < 0:
        nu = as_expr(math.sqrt(-h))
        return as_expr(c3) * FUNCTIONS["sin"](nu * Z) + as_expr(c4) * FUNCTIONS["cos"](nu * Z)
    if h > 0:
        nu = as_expr(math.sqrt(h))
        return as_expr(c3) * FUNCTIONS["sinh"](nu * Z) + as_expr(c4) * FUNCTIONS["cosh"](nu * Z)
    return as_expr(c3) + as_expr(c4) * Z


def _affine(k1, k0, role):
    if k1 == 0 and k0 == 0:
        return ProfileSpec.zero(role)
    return ProfileSpec.affine(k0, k1, role)


def separable(a1, b1, h, c1=1.0, c2=0.0, c3=1.0, c4=0.0, radial="auto", r_max=10.0,
              z_range=(-10.0, 10.0)) -> ClosedFormSolution:
    """``psi = R(r) Z(z)`` for the homogeneous linear equation.

    ``radial="closed"`` uses ``c1 X + c2 Y`` from :func:`radial_basis`;
    ``"numeric"`` uses ``c1`` times the numeric regular branch; ``"auto"``
    prefers the closed form.  ``c3, c4`` weight the z factor.
    """
    a1, b1, h = float(a1), float(b1), float(h)
    mu = h - b1
    basis = radial_basis(a1, mu)
    if radial == "closed" and basis is None:
        raise ParameterError(f"no closed radial form for a1={a1}, mu={mu}")
    use_closed = basis is not None and radial in ("auto", "closed")
    if use_closed:
        rad = as_expr(c1) * basis[0] + as_expr(c2) * basis[1]
        needs_positive = c2 != 0
        r_hi = np.inf
        info = {"radial": "closed"}
    else:
        if c2 != 0:
            raise ParameterError("the numeric radial branch is the regular one only (c2 must be 0)")
        sol = radial_solve(a1, mu, r_max=r_max)
        rad = as_expr(c1) * sol.as_function()(R)
        needs_positive = False
        r_hi = sol.r_max
        info = {"radial": "numeric", "r_max": r_hi}
    expr = simplify(rad * z_factor(h, c3, c4))
    z_lo, z_hi = z_range

    def domain(r, z):
        ok = (r <= r_hi) & (z >= z_lo) & (z <= z_hi)
        return ok & (r > 0) if needs_positive else ok

    params = dict(a1=a1, b1=b1, h=h, mu=mu, c1=c1, c2=c2, c3=c3, c4=c4, **info)
    return ClosedFormSolution(
        "separable", params, expr, _affine(a1, 0, "F"), _affine(b1, 0, "G"), domain,
        (0.05, min(3.0, r_hi), -3.0, 3.0),
    )


def product_mu0(alpha=1.0, nu=1.0, c1=1.0, c2=0.0, c3=1.0, c4=0.0, b1=None) -> ClosedFormSolution:
    """The ``mu = 0`` product ``[c1 sin + c2 cos](alpha r^2/2) [c3 sin + c4 cos](nu z)``.

    ``b1`` defaults to ``-nu^2`` so that ``mu = h - b1 = 0``.
    """
    h = -nu * nu
    b1 = h if b1 is None else b1
    if not math.isclose(h - b1, 0.0, abs_tol=1e-15):
        raise ParameterError("mu = h - b1 must vanish for the product form")
    return separable(-alpha * alpha, b1, h, c1, c2, c3, c4, radial="closed")


# --------------------------------------------------------------------------
# particular solutions and superposition
# --------------------------------------------------------------------------


def particular_solution(case, a0=0.0, b0=0.0, b1=0.0, alpha=None, a1=None) -> ClosedFormSolution:
    """Particular solution of an inhomogeneous linear case.

    ``"c''"`` (``a1 = 0``, ``b0 = 0``, ``b1 != 0``): ``psi0 = -(a0/b1) r^2``.
    ``"c'''"`` (``a1 = -alpha^2``, ``a0 = b1 = 0``): with ``t = alpha r^2/2``,
    ``psi0 = (b0/(2 alpha)) [sin t Ci(t) - cos t Si(t)]``.
    """
    if case in ("c''", "c2"):
        if b1 == 0:
            raise ParameterError("case c'' needs b1 != 0")
        expr = as_expr(-a0 / b1) * R**2
        F = ProfileSpec.affine(a0, 0, "F") if a0 != 0 else ProfileSpec.zero("F")
        G = _affine(b1, 0, "G")
        return ClosedFormSolution("particular_c2", dict(a0=a0, b1=b1, a1=0.0, b0=0.0), expr, F, G,
                                  lambda r, z: np.ones_like(r, dtype=bool), (0.1, 2.0, -1.0, 1.0))
    if case in ("c'''", "c3"):
        if alpha is None:
            if a1 is None or a1 >= 0:
                raise ParameterError("case c''' needs a1 = -alpha^2 < 0")
            alpha = math.sqrt(-a1)
        if alpha <= 0:
            raise ParameterError("alpha must be positive")
        t = as_expr(alpha / 2) * R**2
        sin, cos = FUNCTIONS["sin"], FUNCTIONS["cos"]
        expr = as_expr(b0 / (2 * alpha)) * (sin(t) * FUNCTIONS["ci"](t) - cos(t) * FUNCTIONS["si"](t))
        F = _affine(-alpha * alpha, 0, "F")
        G = ProfileSpec.affine(b0, 0, "G") if b0 != 0 else ProfileSpec.zero("G")
        return ClosedFormSolution("particular_c3", dict(a0=0.0, a1=-alpha * alpha, b0=b0, b1=0.0, alpha=alpha),
                                  expr, F, G, lambda r, z: r > 0, (0.2, 3.0, -1.0, 1.0))
    raise ParameterError(f"no particular solution for case {case!r}")


def _linear_coeffs(spec: ProfileSpec):
    if spec.form == "zero":
        return 0.0, 0.0
    if spec.form == "affine":
        return float(spec.k1), float(spec.k0)
    raise ParameterError(f"profile {spec.text()} is not affine")


def superpose(psi0: ClosedFormSolution, *w1: ClosedFormSolution) -> ClosedFormSolution:
    """``psi0 + sum(w1)`` where each ``w1`` solves the homogeneous equation
    with the same ``(a1, b1)`` as ``psi0``."""
    a1, a0 = _linear_coeffs(psi0.F)
    b1, b0 = _linear_coeffs(psi0.G)
    expr = psi0.expr
    domains = [psi0.domain]
    for w in w1:
        wa1, wa0 = _linear_coeffs(w.F)
        wb1, wb0 = _linear_coeffs(w.G)
        if wa0 != 0 or wb0 != 0:
            raise ParameterError("superposed terms must solve the homogeneous equation")
        if not (math.isclose(wa1, a1, abs_tol=1e-14) and math.isclose(wb1, b1, abs_tol=1e-14)):
            raise ParameterError(f"mismatched (a1, b1): ({wa1}, {wb1}) vs ({a1}, {b1})")
        expr = expr + w.expr
        domains.append(w.domain)

    def domain(r, z):
        out = np.ones(np.broadcast(r, z).shape, dtype=bool)
        for d in domains:
            out &= d(r, z)
        return out

    return ClosedFormSolution("superposition", dict(psi0.params, terms=len(w1)), simplify(expr),
                              psi0.F, psi0.G, domain, psi0.box)

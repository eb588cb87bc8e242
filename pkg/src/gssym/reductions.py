"""Symmetry reductions of the Grad-Shafranov equation to ODEs.

Each :class:`ReducedODE` bundles an equation in one invariant variable
with the map that turns its solution back into ``psi(r, z)``:

================  ======================  ==================================
kind              variable                reconstruction
================  ======================  ==================================
X1_SIMILARITY     y = r/z                 psi = r^(-2q) w(y) - c
EXCEPTIONAL       y = r/(r^2+z^2)         psi = sqrt(r) w(y) - c
EXP_CASE          y = r/z                 psi = (w(y) - 2 log r)/c
COND_KAPPA        s = r^2/2 - kappa z     psi = w(s)
ROT               s = r^2 + z^2           psi = w(s)
WEAK_PAIR         s = sigma r^2 + z^2     psi = w(s)
================  ======================  ==================================

The two ``y = r/z`` equations are even in ``y`` so the lower half-plane
reuses the upper-half solution through ``|y|``; the line ``z = 0`` is
never valid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy.interpolate import PchipInterpolator

from .catalog import ClosedFormSolution
from .errors import NoReduction, NumericFailure, ParameterError
from .expr import FUNCTIONS, R, Z, Function, as_expr
from .grid import GridField, GridSpec
from .ode import ODESolutionTable, dopri5, hermite_residual
from .profiles import ProfileSpec, as_profile, classify

EPS_START = 1e-3


class Kind(str, Enum):
    X1_SIMILARITY = "x1_similarity"
    EXCEPTIONAL = "exceptional"
    EXP_CASE = "exp_case"
    COND_KAPPA = "cond_kappa"
    ROT = "rot"
    WEAK_PAIR = "weak_pair"


def _rpow(w, p):
    # real power; integer exponents keep the sign of w
    p = float(p)
    if p.is_integer():
        return np.power(w, p)
    return np.power(w, p) if np.all(np.asarray(w) > 0) else np.full_like(np.asarray(w, dtype=float), np.nan)


@dataclass(frozen=True)
class ReducedODE:
    kind: Kind
    params: dict
    F: ProfileSpec | None = None
    G: ProfileSpec | None = None
    meta: dict = field(default_factory=dict)

    # -- the equation ---------------------------------------------------------
    def coefficients(self, y):
        """``(P, Q, S)`` of the linear part ``P w'' + Q w' + S`` for the
        y = r/z and exceptional kinds (``S`` multiplies ``w``)."""
        q = self.params.get("q")
        if self.kind is Kind.X1_SIMILARITY:
            return y * y + y**4, 2 * y**3 - 4 * q * y - y, 4 * q * (q + 1)
        if self.kind is Kind.EXP_CASE:
            return y * y + y**4, -y + 2 * y**3, 0.0
        if self.kind is Kind.EXCEPTIONAL:
            return y * y, 0.0 * y, -0.75
        raise ParameterError(f"{self.kind.value} has no (P, Q, S) form")

    def source(self, y, w, dw=None):
        """Right-hand side of the equation as written (profile terms)."""
        p = self.params
        k = self.kind
        if k is Kind.X1_SIMILARITY:
            q = p["q"]
            return p["a"] * _rpow(w, 1 + 2 / q) + p["b"] * _rpow(w, 1 + 1 / q)
        if k is Kind.EXCEPTIONAL:
            return p["a"] * _rpow(w, -7) + p["b"] * _rpow(w, -3)
        if k is Kind.EXP_CASE:
            return p["a"] * np.exp(2 * w) + p["b"] * np.exp(w)
        if k is Kind.COND_KAPPA:
            return self.F(w)
        if k is Kind.ROT:
            return self.G(w)
        if k is Kind.WEAK_PAIR:
            return self.F(w)
        raise AssertionError(k)

    def rhs(self, y, w, dw):
        """``w''`` solved from the equation (first equation for WEAK_PAIR)."""
        k = self.kind
        src = self.source(y, w, dw)
        if k in (Kind.X1_SIMILARITY, Kind.EXP_CASE, Kind.EXCEPTIONAL):
            P, Q, S = self.coefficients(y)
            const = 4.0 if k is Kind.EXP_CASE else 0.0
            return (src - Q * dw - S * w - const) / P
        if k is Kind.COND_KAPPA:
            return src
        if k is Kind.ROT:
            return (src - 2 * dw) / (4 * y)
        if k is Kind.WEAK_PAIR:
            s = self.params["sigma"]
            return src / (4 * (s * s - s))
        raise AssertionError(k)

    def residual(self, y, w, dw, d2w):
        """Left side minus right side of the equation."""
        k = self.kind
        if k in (Kind.X1_SIMILARITY, Kind.EXP_CASE, Kind.EXCEPTIONAL):
            P, Q, S = self.coefficients(y)
            const = 4.0 if k is Kind.EXP_CASE else 0.0
            return P * d2w + Q * dw + S * w + const - self.source(y, w, dw)
        if k is Kind.COND_KAPPA:
            return d2w - self.source(y, w)
        if k is Kind.ROT:
            return 4 * y * d2w + 2 * dw - self.source(y, w)
        s = self.params["sigma"]
        return 4 * (s * s - s) * d2w - self.F(w)

    def second_residual(self, s, w, dw, d2w):
        """Residual of the companion equation ``4 s w'' + 2 w' = G(w)`` of a
        WEAK_PAIR, relative to the size of its terms."""
        if self.kind is not Kind.WEAK_PAIR:
            raise ParameterError("only WEAK_PAIR has a companion equation")
        g = np.asarray(self.G(w), dtype=float)
        lhs = 4 * s * d2w + 2 * dw
        scale = np.maximum.reduce([np.abs(4 * s * d2w), np.abs(2 * dw), np.abs(g), np.ones_like(lhs)])
        return (lhs - g) / scale

    def compatible(self, A, q):
        """Whether the weak-power relations hold for ``(A, q)``."""
        from .profiles import weak_coefficients

        a, b = weak_coefficients(q, A, self.params["sigma"])
        return math.isclose(float(a), float(self.params["a"]), rel_tol=1e-12, abs_tol=1e-14) and math.isclose(
            float(b), float(self.params["b"]), rel_tol=1e-12, abs_tol=1e-14
        )

    # -- invariant variable and reconstruction --------------------------------
    def invariant(self, r, z):
        k = self.kind
        with np.errstate(all="ignore"):
            if k in (Kind.X1_SIMILARITY, Kind.EXP_CASE):
                return np.abs(r / z)
            if k is Kind.EXCEPTIONAL:
                return r / (r * r + z * z)
            if k is Kind.COND_KAPPA:
                return r * r / 2 - self.params["kappa"] * z
            if k is Kind.ROT:
                return r * r + z * z
            return self.params["sigma"] * r * r + z * z

    def invariant_expr(self):
        k = self.kind
        if k in (Kind.X1_SIMILARITY, Kind.EXP_CASE):
            return R / FUNCTIONS["abs"](Z)
        if k is Kind.EXCEPTIONAL:
            return R / (R**2 + Z**2)
        if k is Kind.COND_KAPPA:
            return R**2 / 2 - as_expr(self.params["kappa"]) * Z
        if k is Kind.ROT:
            return R**2 + Z**2
        return as_expr(self.params["sigma"]) * R**2 + Z**2

    def psi_expr(self, w):
        """Reconstruction as an expression in ``r, z`` given ``w`` (an
        expression in the invariant variable already substituted)."""
        k = self.kind
        c = self.params.get("c", 0)
        if k is Kind.X1_SIMILARITY:
            out = R ** as_expr(-2 * self.params["q"]) * w
            return out - as_expr(c) if c else out
        if k is Kind.EXCEPTIONAL:
            out = FUNCTIONS["sqrt"](R) * w
            return out - as_expr(c) if c else out
        if k is Kind.EXP_CASE:
            return (w - 2 * FUNCTIONS["log"](R)) / as_expr(self.params.get("c", 1))
        return w

    def psi_from(self, w, r, z):
        k = self.kind
        c = self.params.get("c", 0) or 0
        if k is Kind.X1_SIMILARITY:
            return np.power(r, -2.0 * self.params["q"]) * w - c
        if k is Kind.EXCEPTIONAL:
            return np.sqrt(r) * w - c
        if k is Kind.EXP_CASE:
            return (w - 2 * np.log(r)) / self.params.get("c", 1)
        return w

    def valid(self, r, z):
        if self.kind in (Kind.X1_SIMILARITY, Kind.EXP_CASE):
            return (z != 0) & (r > 0)
        if self.kind is Kind.EXCEPTIONAL:
            return r > 0
        return np.ones(np.broadcast(r, z).shape, dtype=bool)

    # -- asymptotics ------------------------------------------------------------
    def indicial(self, k):
        """Leading coefficient of the left side for ``w = y^k`` near y = 0;
        zero exactly for the two admissible branches of X1_SIMILARITY."""
        if self.kind is not Kind.X1_SIMILARITY:
            raise ParameterError("indicial relation defined for X1_SIMILARITY only")
        q = self.params["q"]
        return (k - 2 * q) * (k - 2 * q - 2)

    def branch_start(self, branch, eps=EPS_START):
        """``(y0, w0, w0')`` for the small-y branches ``"2q+2"``/``"2q"``."""
        if self.kind is not Kind.X1_SIMILARITY:
            raise ParameterError("branch selectors apply to X1_SIMILARITY only")
        q = self.params["q"]
        k = {"2q+2": 2 * q + 2, "2q": 2 * q}[branch]
        return eps, eps**k, k * eps ** (k - 1)


# --------------------------------------------------------------------------
# building reductions
# --------------------------------------------------------------------------

_TAG_KIND = {
    "a": Kind.X1_SIMILARITY,
    "a'": Kind.X1_SIMILARITY,
    "a''": Kind.X1_SIMILARITY,
    "b": Kind.EXP_CASE,
    "conditional-kappa": Kind.COND_KAPPA,
    "conditional-rotation": Kind.ROT,
    "weak-sigma": Kind.WEAK_PAIR,
}


def reduce(cls, F, G, kind=None, **overrides) -> ReducedODE:
    """Reduced ODE of ``(F, G)`` under the symmetry named by ``cls``.

    ``cls`` is a :class:`SymmetryClass` or a tag string (the matching entry
    of ``classify(F, G)`` is then used).  For the ``a''`` class the
    exceptional reduction is chosen with ``kind="exceptional"``.  Keyword
    overrides replace class parameters (for example ``sigma`` picks the
    partner root of a weak class).
    """
    F, G = as_profile(F, "F"), as_profile(G, "G")
    if isinstance(cls, str):
        tag = cls
        found = [c for c in classify(F, G) if c.tag == tag]
        if not found:
            raise NoReduction(f"profiles are not in class {tag!r}")
        cls = found[0]
    if cls.tag not in _TAG_KIND:
        raise NoReduction(f"class {cls.tag!r} admits no reduction")
    k = Kind(kind) if kind is not None else _TAG_KIND[cls.tag]
    if k is Kind.EXCEPTIONAL and cls.tag != "a''":
        raise NoReduction("the exceptional reduction needs q = -1/4")
    params = {key: _f(v) for key, v in cls.params.items()}
    params.update(overrides)
    if k is Kind.EXP_CASE:
        c = params["c"]
        # psi = phi/c turns the profiles into a e^{2 phi}, b e^{phi} scaled by c
        params = dict(params, a=c * params["a"], b=c * params["b"])
    return ReducedODE(k, params, F, G, meta={"tag": cls.tag})


def _f(v):
    return float(v) if isinstance(v, (Fraction, int, np.floating)) else v


# --------------------------------------------------------------------------
# integration
# --------------------------------------------------------------------------


def integrate(ode: ReducedODE, init, span, tol=1e-10, max_step="auto") -> ODESolutionTable:
    """Integrate the reduced equation.

    ``init`` is ``(y0, w0, w0')`` or a branch selector (``"2q+2"``,
    ``"2q"``) which starts at ``y = 1e-3`` on the small-y power law.
    ``span`` is ``(y_start, y_end)``; the integration runs from the initial
    abscissa to whichever end is farther, and to the other end as well if
    the initial point lies strictly inside.  Blow-up truncates the table
    and sets ``meta["status"] = "blowup"``.  ``max_step="auto"`` caps steps
    at 1/500 of the span so the table is dense enough for interpolation;
    ``None`` leaves the step size to the error control alone.
    """
    if not (1e-12 <= tol <= 1e-4):
        raise ParameterError("tol must lie in [1e-12, 1e-4]")
    if isinstance(init, str):
        init = ode.branch_start(init)
    y0, w0, dw0 = (float(v) for v in init)
    lo, hi = sorted(float(s) for s in span)
    pieces = []
    # absolute floor scaled to the start so tiny branch data is resolved
    kw = dict(rtol=tol, atol=tol * min(1.0, max(abs(w0), abs(dw0) * abs(y0), 1e-300)))
    if max_step == "auto":
        kw["max_step"] = (hi - lo) / 500
    elif max_step is not None:
        kw["max_step"] = float(max_step)
    for end in (hi, lo):
        if end == y0:
            continue
        pieces.append(_run(ode, y0, w0, dw0, end, kw))
    if not pieces:
        raise ParameterError("empty integration span")
    ys = np.concatenate([p[0] for p in pieces])
    us = np.concatenate([p[1] for p in pieces])
    ys, idx = np.unique(ys, return_index=True)
    us = us[idx]
    with np.errstate(all="ignore"):
        d2 = ode.rhs(ys, us[:, 0], us[:, 1])
    good = np.isfinite(us).all(axis=1) & np.isfinite(d2)
    infos = [p[2] for p in pieces]
    meta = dict(
        kind=ode.kind.value, tol=tol,
        accepted=sum(i["accepted"] for i in infos), rejected=sum(i["rejected"] for i in infos),
        status="blowup" if any(i["status"] == "blowup" for i in infos)
        else ("singular" if any(i["status"] == "singular" for i in infos) else "ok"),
        y_start=y0,
    )
    if good.sum() < 2:
        raise NumericFailure("integration failed before producing a usable table")
    return ODESolutionTable(ys[good], us[good, 0], us[good, 1], d2[good], meta)


def _run(ode, y0, w0, dw0, y1, kw):
    def f(y, u):
        return np.array([u[1], ode.rhs(y, u[0], u[1])])

    return dopri5(f, y0, [w0, dw0], y1, **kw)


def rk4_fixed(ode: ReducedODE, init, y1, n=1000) -> ODESolutionTable:
    """Classical fixed-step RK4; a diagnostic cross-check only."""
    if isinstance(init, str):
        init = ode.branch_start(init)
    y, w, dw = (float(v) for v in init)
    h = (y1 - y) / n
    u = np.array([w, dw])

    def f(t, u):
        return np.array([u[1], ode.rhs(t, u[0], u[1])])

    ys, us = [y], [u]
    for _ in range(n):
        k1 = f(y, u)
        k2 = f(y + h / 2, u + h / 2 * k1)
        k3 = f(y + h / 2, u + h / 2 * k2)
        k4 = f(y + h, u + h * k3)
        u = u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        y += h
        ys.append(y)
        us.append(u)
    ys, us = np.array(ys), np.array(us)
    d2 = ode.rhs(ys, us[:, 0], us[:, 1])
    return ODESolutionTable(ys, us[:, 0], us[:, 1], d2, dict(kind=ode.kind.value, method="rk4", steps=n))


def table_residual(ode: ReducedODE, table: ODESolutionTable):
    """Midpoint ODE residual of the cubic Hermite interpolant of the table."""
    return hermite_residual(table, ode.rhs)


def exact_table(ode: ReducedODE, w, dw, ys) -> ODESolutionTable:
    """Table sampled from known ``w`` and ``w'`` callables."""
    ys = np.asarray(ys, dtype=float)
    wv, dv = np.asarray(w(ys), dtype=float) * np.ones_like(ys), np.asarray(dw(ys), dtype=float) * np.ones_like(ys)
    return ODESolutionTable(ys, wv, dv, ode.rhs(ys, wv, dv), {"kind": ode.kind.value, "source": "exact"})


# --------------------------------------------------------------------------
# reconstruction
# --------------------------------------------------------------------------


def reconstruct(ode: ReducedODE, table: ODESolutionTable, grid: GridSpec, method="pchip") -> GridField:
    """Sample psi on ``grid`` from the tabulated reduced solution.

    ``method="pchip"`` uses monotone cubic interpolation of ``w``;
    ``"hermite"`` uses the cubic Hermite interpolant built from ``w'``.
    Nodes whose invariant falls outside the table span are invalid.
    """
    Rg, Zg = grid.mesh()
    y = ode.invariant(Rg, Zg)
    ok = ode.valid(Rg, Zg) & np.isfinite(y) & table.covers(y)
    if not np.any(ok):
        raise ParameterError("grid does not overlap the span of the table")
    if method == "pchip":
        interp = PchipInterpolator(table.y, table.w, extrapolate=False)
    elif method == "hermite":
        interp = table.w_at
    else:
        raise ParameterError(f"unknown interpolation {method!r}")
    psi = np.full(Rg.shape, np.nan)
    with np.errstate(all="ignore"):
        psi[ok] = ode.psi_from(interp(y[ok]), Rg[ok], Zg[ok])
    meta = dict(kind=ode.kind.value, params={k: v for k, v in ode.params.items()}, interpolation=method,
                table_span=list(table.span), table_status=table.meta.get("status"))
    return GridField(grid, psi, ok, meta)


def as_solution(ode: ReducedODE, table: ODESolutionTable, box=None) -> ClosedFormSolution:
    """Wrap a table as a solution object so that jets (and hence exact
    pointwise residuals) are available; ``w''`` comes from the equation."""

    def derivs(y):
        w, dw = table.w_at(y), table.dw_at(y)
        return w, dw, ode.rhs(y, w, dw)

    def check(y):
        if not np.all(table.covers(y)):
            from .errors import DomainError

            raise DomainError("invariant outside the tabulated span")

    tab = Function(f"w_{ode.kind.value}", table.w_at, derivs, check)
    expr = ode.psi_expr(tab(ode.invariant_expr()))

    def domain(r, z):
        return ode.valid(r, z) & table.covers(ode.invariant(r, z))

    return ClosedFormSolution(
        f"reduced[{ode.kind.value}]", dict(ode.params), expr,
        ode.F if ode.F is not None else ProfileSpec.zero("F"),
        ode.G if ode.G is not None else ProfileSpec.zero("G"),
        domain, box or (0.1, 2.0, 0.1, 2.0),
    )

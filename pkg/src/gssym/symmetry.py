"""Point-symmetry generators and the finite maps they induce on solutions.

A generator is a vector field ``xi_r d_r + xi_z d_z + eta d_psi`` whose
components are expression trees in ``(r, z, psi)``.  Generators of Lie
point symmetries come with a finite solution map; conditional generators
(tangent only to a restricted solution set) do not, and asking for one
raises ``TypeError``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .catalog import ClosedFormSolution
from .errors import ClassMismatch, ParameterError
from .expr import PSI, R, Z, Expr, as_expr, diff, evaluate, simplify, subs, to_text
from .profiles import _close, classify

_COORDS = ("r", "z", "psi")


@dataclass(frozen=True)
class PointGenerator:
    label: str
    xi_r: Expr
    xi_z: Expr
    eta: Expr
    conditional: bool = False

    def __post_init__(self):
        for name in ("xi_r", "xi_z", "eta"):
            object.__setattr__(self, name, simplify(as_expr(getattr(self, name))))

    @property
    def components(self):
        return (self.xi_r, self.xi_z, self.eta)

    def apply(self, f) -> Expr:
        """The derivative of ``f(r, z, psi)`` along the field."""
        f = as_expr(f)
        terms = [c * diff(f, v) for c, v in zip(self.components, _COORDS)]
        return simplify(terms[0] + terms[1] + terms[2])

    def __call__(self, r, z, psi):
        env = {"r": r, "z": z, "psi": psi}
        shape = np.broadcast(np.asarray(r), np.asarray(z), np.asarray(psi)).shape
        return tuple(np.broadcast_to(evaluate(c, env), shape) for c in self.components)

    def scaled(self, k) -> PointGenerator:
        k = as_expr(k)
        return PointGenerator(f"{k}*{self.label}", k * self.xi_r, k * self.xi_z, k * self.eta, self.conditional)

    def __add__(self, other: PointGenerator) -> PointGenerator:
        return PointGenerator(
            f"{self.label}+{other.label}",
            self.xi_r + other.xi_r, self.xi_z + other.xi_z, self.eta + other.eta,
            self.conditional or other.conditional,
        )

    def __sub__(self, other):
        return self + other.scaled(-1)

    def text(self):
        return "(" + ", ".join(to_text(c) for c in self.components) + ")"


def commutator(v: PointGenerator, w: PointGenerator) -> PointGenerator:
    """Lie bracket, componentwise ``V(W^i) - W(V^i)``."""
    comps = [simplify(v.apply(wi) - w.apply(vi)) for vi, wi in zip(v.components, w.components)]
    return PointGenerator(f"[{v.label},{w.label}]", *comps, conditional=v.conditional or w.conditional)


def sample_points(n=50, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.5, 2.0, n), rng.uniform(-1.0, 1.0, n), rng.uniform(0.5, 2.0, n)


def generators_equal(v, w, n=50, atol=1e-10, seed=0) -> bool:
    """Componentwise agreement at ``n`` random points of the default box."""
    r, z, psi = sample_points(n, seed)
    return all(np.max(np.abs(a - b)) <= atol for a, b in zip(v(r, z, psi), w(r, z, psi)))


def characteristic(gen: PointGenerator, sol: ClosedFormSolution, r, z):
    """``eta - xi_r psi_r - xi_z psi_z`` on the graph of ``sol``.

    It vanishes identically exactly when the solution is invariant under
    the generator.
    """
    j = sol.jet(r, z)
    xr, xz, eta = gen(r, z, j.value)
    return eta - xr * j.d_r - xz * j.d_z


# --------------------------------------------------------------------------
# built-in generators
# --------------------------------------------------------------------------

Z_TRANSLATE = PointGenerator("Z", 0, 1, 0)
SCALE_PSI = PointGenerator("P", 0, 0, PSI)
SCALE_RZ = PointGenerator("S", R, Z, 0)


def x1(q) -> PointGenerator:
    return PointGenerator(f"X1({q})", R, Z, as_expr(-2 * q) * PSI)


def x1_shifted(q, c) -> PointGenerator:
    return PointGenerator(f"X1'({q},{c})", R, Z, as_expr(-2 * q) * (PSI + as_expr(c)))


def x_exceptional(c=0) -> PointGenerator:
    return PointGenerator(f"X''({c})", 2 * R * Z, Z**2 - R**2, Z * (PSI + as_expr(c)))


def x2(c) -> PointGenerator:
    if c == 0:
        raise ParameterError("X2 needs c != 0")
    eta = Fraction(-2) / c if isinstance(c, (int, Fraction)) else -2.0 / c
    return PointGenerator(f"X2({c})", R, Z, eta)


def y_cond_kappa(kappa) -> PointGenerator:
    return PointGenerator(f"Y_kappa({kappa})", as_expr(kappa), R, 0, conditional=True)


def y_rot() -> PointGenerator:
    return PointGenerator("Y_rot", Z, -R, 0, conditional=True)


def y_weak(sigma) -> PointGenerator:
    return PointGenerator(f"Y_weak({sigma})", Z, as_expr(-sigma) * R, 0, conditional=True)


def solution_map(gen: PointGenerator, sol, lam):
    """Finite map of a Lie point generator; conditional ones have none."""
    if gen.conditional:
        raise TypeError(f"{gen.label} is a conditional symmetry and maps no solutions")
    label = gen.label
    if label.startswith("X1"):
        return scaling_map(sol, lam)
    if label.startswith("X''"):
        return exceptional_map(sol, lam)
    if label.startswith("X2"):
        return exp_case_map(sol, lam)
    raise TypeError(f"no finite map registered for {label}")


# --------------------------------------------------------------------------
# finite maps
# --------------------------------------------------------------------------


def _find(sol, tags):
    for cls in classify(sol.F, sol.G):
        if cls.tag in tags:
            return cls
    return None


def _image(sol, expr, domain, box, label, **extra):
    params = dict(sol.params, source=sol.family, **extra)
    return replace(sol, family=f"{label}[{sol.family}]", params=params, expr=simplify(expr), domain=domain, box=box)


def scaling_map(sol: ClosedFormSolution, lam, q=None, c=None) -> ClosedFormSolution:
    """``psi~ = e^{2 lam q} psi(e^lam r, e^lam z) + c (e^{2 lam q} - 1)``.

    ``q`` and ``c`` are read from the power-type class of the solution's
    profiles; passing them explicitly only checks agreement.
    """
    cls = _find(sol, ("a", "a'", "a''"))
    if cls is None:
        raise ClassMismatch(f"{sol.family} profiles are not of power type; the scaling map does not apply")
    if q is not None and not _close(float(q), float(cls["q"])):
        raise ClassMismatch(f"solution has q={cls['q']}, not {q}")
    if c is not None and not _close(float(c), float(cls["c"])):
        raise ClassMismatch(f"solution has c={cls['c']}, not {c}")
    q, c = float(cls["q"]), float(cls["c"])
    k = math.exp(2 * lam * q)
    e = math.exp(lam)
    moved = subs(sol.expr, {"r": as_expr(e) * R, "z": as_expr(e) * Z})
    expr = as_expr(k) * moved + as_expr(c * (k - 1))
    dom = lambda r, z: sol.domain(e * r, e * z)  # noqa: E731
    r0, r1, z0, z1 = sol.box
    return _image(sol, expr, dom, (r0 / e, r1 / e, z0 / e, z1 / e), "scaled", lam=lam)


def exceptional_map(sol: ClosedFormSolution, lam, box=None) -> ClosedFormSolution:
    """Finite map of the exceptional generator (q = -1/4).

    With ``C = 1 + lam^2 (r^2+z^2) + 2 lam z``::

        psi~ + c = C^{1/2} (psi(r/C, (z + lam (r^2+z^2))/C) + c)
    """
    cls = _find(sol, ("a''",))
    if cls is None:
        raise ClassMismatch(f"{sol.family} is not in the q = -1/4 class; the exceptional map does not apply")
    c = float(cls["c"])
    rho2 = R**2 + Z**2
    C = 1 + as_expr(lam * lam) * rho2 + as_expr(2 * lam) * Z
    moved = subs(sol.expr, {"r": R / C, "z": (Z + as_expr(lam) * rho2) / C})
    if c == 0:
        expr = C ** as_expr(0.5) * moved
    else:
        expr = C ** as_expr(0.5) * (moved + as_expr(c)) - as_expr(c)

    def dom(r, z):
        cc = 1 + lam * lam * (r * r + z * z) + 2 * lam * z
        ok = cc > 0
        with np.errstate(all="ignore"):
            return ok & sol.domain(r / cc, (z + lam * (r * r + z * z)) / cc)

    if box is None:
        box = _mapped_box(sol, -lam)
    return _image(sol, expr, dom, box, "exceptional", lam=lam)


def _exceptional_point(r, z, lam):
    cc = 1 + lam * lam * (r * r + z * z) + 2 * lam * z
    return r / cc, (z + lam * (r * r + z * z)) / cc


def _mapped_box(sol, lam, n=4000):
    # The inverse transform has parameter -lam, so the image domain is the
    # forward image of the source domain; bound it from samples.
    rng = np.random.default_rng(7)
    r0, r1, z0, z1 = sol.box
    r = rng.uniform(r0, r1, n)
    z = rng.uniform(z0, z1, n)
    keep = sol.inside(r, z)
    rr, zz = _exceptional_point(r[keep], z[keep], lam)
    good = np.isfinite(rr) & np.isfinite(zz) & (rr > 0)
    rr, zz = rr[good], zz[good]
    if rr.size == 0:
        return sol.box
    return (float(rr.min()), float(rr.max()), float(zz.min()), float(zz.max()))


def exp_case_map(sol: ClosedFormSolution, lam) -> ClosedFormSolution:
    """``psi~ = psi(r e^lam, z e^lam) + 2 lam / c`` for exponential profiles."""
    cls = _find(sol, ("b",))
    if cls is None:
        raise ClassMismatch(f"{sol.family} profiles are not exponential; the exponential-case map does not apply")
    c = float(cls["c"])
    e = math.exp(lam)
    expr = subs(sol.expr, {"r": as_expr(e) * R, "z": as_expr(e) * Z}) + as_expr(2 * lam / c)
    dom = lambda r, z: sol.domain(e * r, e * z)  # noqa: E731
    r0, r1, z0, z1 = sol.box
    return _image(sol, expr, dom, (r0 / e, r1 / e, z0 / e, z1 / e), "exp-scaled", lam=lam)

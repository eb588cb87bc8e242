"""Magnetic field, pressure and current profiles, flux contours and q.

The poloidal field follows from the flux function, ``r B_r = -psi_z`` and
``r B_z = psi_r``, and the toroidal field from ``r B_phi = I(psi)``.  The
profile functions satisfy ``dp/dpsi = -F/(4 pi)`` and ``-I dI/dpsi = G``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from skimage.measure import find_contours

from .errors import DomainError, NumericFailure, ParameterError
from .expr import diff, jet_eval
from .grid import GridField, GridSpec, sample_solution
from .profiles import as_profile


@dataclass(frozen=True)
class FieldTriple:
    B_r: float | np.ndarray
    B_phi: float | np.ndarray
    B_z: float | np.ndarray


def _profile_fn(I):
    """Callable ``I(psi)`` from a profile, text, constant or callable."""
    if I is None:
        return lambda psi: np.zeros_like(np.asarray(psi, dtype=float))
    if callable(I) and not isinstance(I, str):
        return I
    if isinstance(I, (int, float)):
        return lambda psi: np.full_like(np.asarray(psi, dtype=float), float(I))
    return as_profile(I, "I")


def b_field(sol, I, r, z) -> FieldTriple:
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("field components need r > 0")
    j = sol.jet(r, z)
    Ifn = _profile_fn(I)
    bphi = np.asarray(Ifn(j.value), dtype=float) / r
    out = (-j.d_z / r, bphi, j.d_r / r)
    if np.ndim(r) == 0:
        out = tuple(float(v) for v in out)
    return FieldTriple(*out)


def i_consistency(I, G, psi, h=1e-5):
    """Relative mismatch of ``-1/2 d(I^2)/dpsi`` (central difference) and
    ``G(psi)``."""
    Ifn, G = _profile_fn(I), as_profile(G, "G")
    psi = np.asarray(psi, dtype=float)
    step = h * np.maximum(np.abs(psi), 1.0)
    d = -(Ifn(psi + step) ** 2 - Ifn(psi - step) ** 2) / (4 * step)
    g = np.asarray(G(psi), dtype=float)
    return np.abs(d - g) / np.maximum(np.abs(g), 1e-300)


def divergence(sol, r, z):
    """``div B`` from jets of the symbolic first derivatives of psi.

    ``psi_r`` and ``psi_z`` are differentiated symbolically and their jets
    evaluated separately, so the mixed partials are computed along two
    different routes rather than cancelling by construction.
    """
    r = np.asarray(r, dtype=float)
    sol._check(r, z)
    pr = jet_eval(diff(sol.expr, "r"), r, z)
    pz = jet_eval(diff(sol.expr, "z"), r, z)
    # (1/r) d(r B_r)/dr + dB_z/dz with r B_r = -psi_z and B_z = psi_r / r
    return (-pz.d_r) / r + pr.d_z / r


# --------------------------------------------------------------------------
# profiles for the q = -1/4 family
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PIProfiles:
    """``p = p0 + (a/24 pi) psi^-6`` and ``I^2 = I0^2 + b psi^-2``."""

    a: float
    b: float
    p0: float
    I0: float
    sign: float = 1.0

    def p(self, psi):
        return self.p0 + self.a / (24 * math.pi) * np.power(psi, -6.0)

    def dp(self, psi):
        return -self.a / (4 * math.pi) * np.power(psi, -7.0)

    def i_squared(self, psi):
        return self.I0**2 + self.b * np.power(psi, -2.0)

    def I(self, psi):
        i2 = self.i_squared(psi)
        if np.any(i2 < 0):
            raise DomainError("I^2 < 0: the azimuthal current profile is not real here")
        return self.sign * np.sqrt(i2)

    def F(self, psi):
        return self.a * np.power(psi, -7.0)

    def G(self, psi):
        return self.b * np.power(psi, -3.0)


def p_and_i_maps(a, b, p0=None, I0=0.0, psi0=None, sign=1.0) -> PIProfiles:
    """Pressure and current functions; with ``psi0`` and no ``p0`` the
    pressure is made to vanish on the surface ``psi = psi0``."""
    if p0 is None:
        if psi0 is None:
            raise ParameterError("give p0 or the boundary level psi0")
        p0 = -a / (24 * math.pi) * psi0**-6
    return PIProfiles(float(a), float(b), float(p0), float(I0), float(sign))


# --------------------------------------------------------------------------
# contours
# --------------------------------------------------------------------------


@dataclass
class ContourSet:
    level: float
    polylines: list = field(default_factory=list)  # arrays of shape (n, 2): columns r, z
    closed: list = field(default_factory=list)

    def __len__(self):
        return len(self.polylines)


def _signed_area(p):
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def trace_contour(f: GridField, level) -> ContourSet:
    """Marching squares with linear interpolation inside cells.

    Polylines are returned counter-clockwise in the (r, z) plane; closed
    ones repeat their first vertex at the end.
    """
    data = np.where(f.valid, f.psi, np.nan)
    lo, hi = np.nanmin(data) if np.any(f.valid) else np.nan, np.nanmax(data) if np.any(f.valid) else np.nan
    out = ContourSet(float(level))
    if not np.any(f.valid) or not (lo <= level <= hi):
        return out
    filled = np.where(f.valid, f.psi, lo - 1.0)
    spec = f.spec
    for c in find_contours(filled, level, mask=f.valid):
        pts = np.column_stack([spec.r_min + c[:, 1] * spec.dr, spec.z_min + c[:, 0] * spec.dz])
        closed = len(pts) > 3 and np.allclose(pts[0], pts[-1])
        if closed and _signed_area(pts) < 0:
            pts = pts[::-1]
        out.polylines.append(pts)
        out.closed.append(bool(closed))
    return out


def project_to_level(sol, pts, level, iters=8):
    """Newton steps along the gradient onto ``psi = level``."""
    r, z = pts[:, 0].copy(), pts[:, 1].copy()
    for _ in range(iters):
        j = sol.jet(r, z)
        g2 = j.d_r**2 + j.d_z**2
        if np.any(g2 == 0):
            raise NumericFailure(f"stagnation point on the contour psi = {level}")
        t = (j.value - level) / g2
        r, z = r - t * j.d_r, z - t * j.d_z
        if np.max(np.abs(t) * np.sqrt(g2)) < 1e-14:
            break
    return np.column_stack([r, z])


# --------------------------------------------------------------------------
# magnetic axis and safety factor
# --------------------------------------------------------------------------


def magnetic_axis(sol, guess=None, kind="max", tol=1e-13):
    """Extremum of psi: pattern search, then damped Newton on exact jets."""
    sign = -1.0 if kind == "max" else 1.0
    if guess is None:
        spec = GridSpec.from_box(sol.box, 81, 81)
        g = sample_solution(sol, spec)
        vals = np.where(g.valid, sign * g.psi, np.inf)
        iz, ir = np.unravel_index(np.argmin(vals), vals.shape)
        guess = (spec.r[ir], spec.z[iz])

    def obj(x):
        if not sol.inside(x[0], x[1]):
            return np.inf
        return sign * float(sol(x[0], x[1]))

    res = minimize(obj, np.asarray(guess, dtype=float), method="Nelder-Mead",
                   options=dict(xatol=1e-10, fatol=1e-14, maxiter=4000))
    x = res.x.copy()
    for _ in range(50):
        j = sol.jet(x[0], x[1])
        grad = np.array([j.d_r, j.d_z])
        H = np.array([[j.d_rr, j.d_rz], [j.d_rz, j.d_zz]])
        step = np.linalg.solve(H, grad)
        damp = 1.0
        while damp > 1e-4 and not sol.inside(x[0] - damp * step[0], x[1] - damp * step[1]):
            damp /= 2
        x = x - damp * step
        if np.linalg.norm(step) < tol:
            break
    return float(x[0]), float(x[1]), float(sol(x[0], x[1]))


def _ray_roots(sol, axis, thetas, level, rho_max, n_grid=200):
    """Distance from the axis to ``psi = level`` along each ray.

    The predicate "in the domain and on the axis side of the level" holds
    on an initial segment of every ray; a vectorised bisection locates its
    end, which is the contour crossing (or the domain edge, an error).
    """
    r0, z0, p0 = axis
    side = np.sign(p0 - level)
    c, s = np.cos(thetas)[:, None], np.sin(thetas)[:, None]

    def good(rho):
        psi, ok = sol.values(r0 + rho * c, z0 + rho * s)
        return ok & (side * (psi - level) > 0)

    grid = np.geomspace(rho_max * 1e-6, rho_max, n_grid)[None, :]
    g = good(grid)
    if not np.all(g[:, 0]):
        raise NumericFailure(f"level {level} is too close to the axis value")
    first_bad = np.argmin(g, axis=1)
    if np.any(g.all(axis=1)):
        raise NumericFailure(f"contour psi = {level} does not close within the search radius")
    lo = grid[0, np.maximum(first_bad - 1, 0)]
    hi = grid[0, first_bad]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        ok = good(mid[:, None])[:, 0]
        lo, hi = np.where(ok, mid, lo), np.where(ok, hi, mid)
    psi_end, _ = sol.values(r0 + hi * c[:, 0], z0 + hi * s[:, 0])
    miss = ~(np.abs(psi_end - level) <= 1e-8 * max(1.0, abs(level)))
    if np.any(miss):
        k = int(np.argmax(miss))
        raise NumericFailure(f"contour psi = {level} does not close around the axis (theta = {thetas[k]:.3f})")
    return 0.5 * (lo + hi)


def toroidal_flux(sol, I, level, axis, n_theta=256, n_rho=48, rho_max=None):
    """``Phi = integral of I/r dA`` over the region bounded by ``psi = level``
    around the axis (polar quadrature centred on the axis)."""
    Ifn = _profile_fn(I)
    rho_max = rho_max or max(sol.box[1] - sol.box[0], sol.box[3] - sol.box[2])
    thetas = np.linspace(0, 2 * np.pi, n_theta, endpoint=False)
    rb = _ray_roots(sol, axis, thetas, level, rho_max)
    x, wts = np.polynomial.legendre.leggauss(n_rho)
    rho = 0.5 * rb[:, None] * (x[None, :] + 1)
    r = axis[0] + rho * np.cos(thetas)[:, None]
    z = axis[1] + rho * np.sin(thetas)[:, None]
    vals = np.asarray(Ifn(sol(r, z)), dtype=float) / r * rho
    per_ray = 0.5 * rb * (vals @ wts)
    return float(per_ray.sum() * (2 * np.pi / n_theta))


def _q_line(sol, I, pts):
    Ifn = _profile_fn(I)
    j = sol.jet(pts[:, 0], pts[:, 1])
    integrand = np.asarray(Ifn(j.value), dtype=float) / (pts[:, 0] * np.hypot(j.d_r, j.d_z))
    seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
    return float(np.sum(0.5 * (integrand[1:] + integrand[:-1]) * seg) / (2 * np.pi))


def _refine(pts):
    mid = 0.5 * (pts[1:] + pts[:-1])
    out = np.empty((2 * len(pts) - 1, 2))
    out[0::2] = pts
    out[1::2] = mid
    return out


@dataclass
class SafetyRow:
    psi: float
    q_contour: float
    q_flux: float
    n_vertices: int

    def agreement(self):
        return abs(self.q_contour - self.q_flux) / abs(self.q_flux)


def safety_factor(sol, I, levels, axis=None, grid_n=161, rel_change=0.005, flux_step=None):
    """q on each flux surface, two ways.

    ``q_contour = (1/2 pi) \\oint I/(r |grad psi|) dl`` by the trapezoid rule
    on the marching-squares contour, projected onto the exact level and
    refined until q changes by less than ``rel_change``.  ``q_flux`` is
    ``|dPhi/dpsi| / (2 pi)`` from the toroidal flux by central differences.
    """
    if axis is None:
        axis = magnetic_axis(sol)
    spec = GridSpec.from_box(sol.box, grid_n, grid_n)
    g = sample_solution(sol, spec)
    rows = []
    for level in levels:
        level = float(level)
        cs = trace_contour(g, level)
        closed = [p for p, c in zip(cs.polylines, cs.closed) if c and len(p) >= 9]
        if not closed:
            raise NumericFailure(f"no closed contour at psi = {level}")
        # the surface that encloses the axis
        pts = max(closed, key=lambda p: abs(_signed_area(p)))
        pts = project_to_level(sol, pts, level)
        q_old = _q_line(sol, I, pts)
        for _ in range(6):
            pts = project_to_level(sol, _refine(pts), level)
            q = _q_line(sol, I, pts)
            done = abs(q - q_old) < rel_change * abs(q)
            q_old = q
            if done:
                break
        d = flux_step or 1e-3 * abs(axis[2] - level)
        phi_in = toroidal_flux(sol, I, level + d if axis[2] > level else level - d, axis)
        phi_out = toroidal_flux(sol, I, level - d if axis[2] > level else level + d, axis)
        qf = abs(phi_out - phi_in) / (2 * d) / (2 * np.pi)
        rows.append(SafetyRow(level, q_old, qf, len(pts)))
    return rows


def level_ladder(psi_edge, psi_axis, n=8):
    """``n`` levels evenly spaced strictly between the edge and the axis."""
    return [psi_edge + k * (psi_axis - psi_edge) / (n + 1) for k in range(1, n + 1)]

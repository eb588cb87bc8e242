"""Grad-Shafranov operator and residual checks.

``residual`` uses exact jets of a closed-form solution; ``grid_residual``
uses second-order central differences on a sampled field.  Relative
residuals divide by the local scale ``max(|LHS|, |r^2 F|, |G|, 1)`` and
points with ``|psi|`` below a floor (default 1e-3) are skipped and
counted, since power profiles such as ``psi^-7`` blow up there.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError, ParameterError
from .grid import GridField
from .jets import ScalarJet
from .profiles import as_profile

DEFAULT_SEED = 20101020
PSI_FLOOR = 1e-3


def gs_lhs(j: ScalarJet, r):
    """``psi_rr - psi_r / r + psi_zz`` from a jet."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("the Grad-Shafranov operator is singular on the axis r = 0")
    out = j.d_rr - j.d_r / r + j.d_zz
    return out if np.ndim(out) else float(out)


def gs_rhs(F, G, psi, r):
    F, G = as_profile(F, "F"), as_profile(G, "G")
    psi = np.asarray(psi, dtype=float)
    f = np.broadcast_to(np.asarray(F(psi), dtype=float), psi.shape)
    g = np.broadcast_to(np.asarray(G(psi), dtype=float), psi.shape)
    return r * r * f, g


@dataclass
class ResidualReport:
    n_points: int
    max_abs: float
    rms: float
    max_rel: float
    scale: float
    excluded: int = 0
    failures: list = field(default_factory=list)
    order: float | None = None

    @property
    def relative(self):
        """``max_abs / scale`` when the scale is positive."""
        return self.max_abs / self.scale if self.scale > 0 else None

    def passes(self, tol):
        return self.n_points > 0 and self.max_rel <= tol

    def to_dict(self):
        d = asdict(self)
        d["failures"] = [list(map(float, p)) for p in self.failures[:20]]
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _report(res, scale_local, excluded, failures=(), order=None):
    res = np.asarray(res, dtype=float)
    if res.size == 0:
        return ResidualReport(0, 0.0, 0.0, 0.0, 0.0, excluded, list(failures), order)
    a = np.abs(res)
    return ResidualReport(
        int(res.size), float(a.max()), float(np.sqrt(np.mean(res * res))),
        float(np.max(a / scale_local)), float(np.max(scale_local)), excluded, list(failures), order,
    )


def sample_domain(sol, n=1000, seed=DEFAULT_SEED, box=None, max_tries=200):
    """``n`` uniform points of ``sol``'s box that lie in its domain."""
    rng = np.random.default_rng(seed)
    r0, r1, z0, z1 = box or sol.box
    rs, zs, got = [], [], 0
    for _ in range(max_tries):
        r = rng.uniform(r0, r1, 4 * n)
        z = rng.uniform(z0, z1, 4 * n)
        keep = sol.inside(r, z)
        rs.append(r[keep])
        zs.append(z[keep])
        got += int(keep.sum())
        if got >= n:
            break
    if got == 0:
        raise DomainError(f"no in-domain points found in the box of {sol.family}")
    return np.concatenate(rs)[:n], np.concatenate(zs)[:n]


def residual(sol, points=None, n=1000, seed=DEFAULT_SEED, psi_floor=PSI_FLOOR, F=None, G=None) -> ResidualReport:
    """Exact-jet residual ``LHS - (r^2 F + G)`` of a closed-form solution.

    ``points`` is ``(r, z)`` arrays; otherwise ``n`` random in-domain
    points are drawn with ``seed``.  ``F``/``G`` override the solution's
    own profiles.
    """
    if points is None:
        r, z = sample_domain(sol, n, seed)
    else:
        r, z = (np.atleast_1d(np.asarray(p, dtype=float)) for p in points)
        inside = sol.inside(r, z)
        if not np.any(inside):
            raise DomainError("all points are outside the solution domain")
        failures = list(zip(r[~inside], z[~inside]))
        r, z = r[inside], z[inside]
    failures = [] if points is None else failures
    j = sol.jet(r, z)
    keep = np.abs(j.value) >= psi_floor
    excluded = int((~keep).sum())
    r, z = r[keep], z[keep]
    j = ScalarJet(*(np.asarray(e)[keep] if np.ndim(e) else e for e in j.entries()))
    lhs = gs_lhs(j, r)
    f, g = gs_rhs(F if F is not None else sol.F, G if G is not None else sol.G, j.value, r)
    res = lhs - f - g
    scale = np.maximum.reduce([np.abs(lhs), np.abs(f), np.abs(g), np.ones_like(lhs)])
    return _report(res, scale, excluded, failures)


# --------------------------------------------------------------------------
# finite differences
# --------------------------------------------------------------------------


def fd_lhs(field: GridField):
    """Central-difference LHS on interior nodes whose stencil is valid."""
    psi, ok = field.psi, field.valid
    ny, nx = psi.shape
    if nx < 5 or ny < 5:
        raise ParameterError("grid residual needs at least 5x5 nodes")
    hr, hz = field.spec.dr, field.spec.dz
    Rg, _ = field.spec.mesh()
    lhs = np.full(psi.shape, np.nan)
    c = (slice(1, -1), slice(1, -1))
    e, w = (slice(1, -1), slice(2, None)), (slice(1, -1), slice(None, -2))
    n, s = (slice(2, None), slice(1, -1)), (slice(None, -2), slice(1, -1))
    stencil_ok = ok[c] & ok[e] & ok[w] & ok[n] & ok[s] & (Rg[c] > 0)
    with np.errstate(all="ignore"):
        prr = (psi[e] - 2 * psi[c] + psi[w]) / hr**2
        pr = (psi[e] - psi[w]) / (2 * hr)
        pzz = (psi[n] - 2 * psi[c] + psi[s]) / hz**2
        inner = prr - pr / Rg[c] + pzz
    lhs[c] = np.where(stencil_ok, inner, np.nan)
    return lhs


def grid_residual(field: GridField, F, G, refined: GridField | None = None, psi_floor=PSI_FLOOR) -> ResidualReport:
    """FD residual on interior nodes.

    With ``refined`` (the same box at half spacing, e.g. from
    ``spec.refined()``) the residual is also evaluated at the coarse nodes
    on the fine grid and ``order = log2(err_h / err_h2)`` is reported.
    """
    lhs = fd_lhs(field)
    Rg, _ = field.spec.mesh()
    use = np.isfinite(lhs) & (np.abs(field.psi) >= psi_floor)
    excluded = int((np.isfinite(lhs) & ~use).sum())
    f, g = gs_rhs(F, G, np.where(use, field.psi, 1.0), Rg)
    res = (lhs - f - g)[use]
    scale = np.maximum.reduce([np.abs(lhs[use]), np.abs(f[use]), np.abs(g[use]), np.ones(res.shape)])
    order = None
    if refined is not None:
        lhs2 = fd_lhs(refined)[::2, ::2]
        if lhs2.shape != lhs.shape:
            raise ParameterError("refined grid must halve the spacing of the coarse one")
        f2, g2 = gs_rhs(F, G, np.where(use, refined.psi[::2, ::2], 1.0), Rg)
        both = use & np.isfinite(lhs2)
        e1 = np.max(np.abs(lhs - f - g)[both])
        e2 = np.max(np.abs(lhs2 - f2 - g2)[both])
        order = float(np.log2(e1 / e2)) if e2 > 0 and e1 > 0 else float("inf")
    return _report(res, scale, excluded, order=order)

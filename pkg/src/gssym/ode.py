"""Adaptive Dormand-Prince 5(4) integration of second-order scalar ODEs.

The integrator is written out here rather than taken from SciPy because
the reduced equations need things ``solve_ivp`` does not report: the
number of rejected steps, a blow-up stop with the last good state kept,
and a dense table that stores ``w''`` at every node for cubic Hermite
reconstruction of the derivative.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import NumericFailure

# Dormand-Prince tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

BLOWUP = 1e12


@dataclass
class ODESolutionTable:
    """Nodes ``y`` with ``w``, ``w'`` and ``w''`` from the integration."""

    y: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    d2w: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        order = np.argsort(self.y)
        self.y, self.w, self.dw, self.d2w = (np.asarray(a, dtype=float)[order] for a in (self.y, self.w, self.dw, self.d2w))
        self._w = CubicHermiteSpline(self.y, self.w, self.dw, extrapolate=False)
        self._dw = CubicHermiteSpline(self.y, self.dw, self.d2w, extrapolate=False)

    @property
    def span(self):
        return float(self.y[0]), float(self.y[-1])

    def covers(self, y):
        lo, hi = self.span
        y = np.asarray(y)
        return (y >= lo) & (y <= hi)

    def w_at(self, y):
        return self._w(y)

    def dw_at(self, y):
        return self._dw(y)

    def d2w_at(self, y):
        # derivative of the Hermite interpolant of w'; continuous enough for jets
        return self._dw.derivative()(y)

    def to_rows(self):
        return np.column_stack([self.y, self.w, self.dw])


def _rk_step(f, y, u, h):
    k = np.empty((7, u.size))
    k[0] = f(y, u)
    for i in range(1, 7):
        k[i] = f(y + _C[i] * h, u + h * np.dot(_A[i], k[:i]))
    u5 = u + h * np.dot(_B5[:6], k[:6])
    err = h * np.dot(_E, k)
    return u5, err, k


def dopri5(f, y0, u0, y1, rtol=1e-10, atol=1e-12, h0=None, max_step=None, max_steps=200000, blowup=BLOWUP):
    """Integrate ``u' = f(y, u)`` from ``y0`` towards ``y1``.

    Returns ``(ys, us, info)`` where ``info`` carries ``accepted``,
    ``rejected``, ``status`` ("ok", "blowup" or "singular") and the final
    abscissa.  Blow-up (``|u[0]| > blowup``) and non-finite states stop the
    run and keep the last good state; neither raises.
    """
    u = np.array(u0, dtype=float)
    y = float(y0)
    direction = 1.0 if y1 >= y0 else -1.0
    span = abs(y1 - y0)
    if span == 0:
        return np.array([y]), u[None, :], dict(accepted=0, rejected=0, status="ok", y_end=y)
    hmax = span if max_step is None else min(span, float(max_step))
    h = min(hmax, h0 if h0 is not None else 1e-3 * span) * direction
    ys, us = [y], [u.copy()]
    accepted = rejected = 0
    err_prev = 1e-4
    status = "ok"
    hmin = 1e-14 * max(1.0, abs(y0), abs(y1))
    while (y1 - y) * direction > hmin:
        if accepted + rejected > max_steps:
            raise NumericFailure(f"step budget exhausted at y={y}")
        if (y + h - y1) * direction > 0:
            h = y1 - y
        with np.errstate(all="ignore"):
            u_new, err, _ = _rk_step(f, y, u, h)
        scale = atol + rtol * np.maximum(np.abs(u), np.abs(u_new))
        en = float(np.sqrt(np.mean((err / scale) ** 2))) if np.all(np.isfinite(u_new)) else np.inf
        if en <= 1.0:
            y += h
            u = u_new
            accepted += 1
            ys.append(y)
            us.append(u.copy())
            if abs(u[0]) > blowup:
                status = "blowup"
                break
            # PI step-size control
            fac = 0.9 * en ** (-0.7 / 5) * err_prev ** (0.4 / 5) if en > 0 else 5.0
            h *= min(5.0, max(0.2, fac))
            if abs(h) > hmax:
                h = hmax * direction
            err_prev = max(en, 1e-4)
        else:
            rejected += 1
            fac = 0.9 * en ** (-1 / 5) if np.isfinite(en) else 0.1
            h *= max(0.1, min(0.9, fac))
        if abs(h) < hmin:
            status = "singular"
            break
    info = dict(accepted=accepted, rejected=rejected, status=status, y_end=y)
    return np.array(ys), np.array(us), info


def integrate_second_order(rhs, y0, w0, dw0, y1, rtol=1e-10, atol=1e-12, **kw) -> ODESolutionTable:
    """Integrate ``w'' = rhs(y, w, w')`` and tabulate ``(y, w, w', w'')``."""

    def f(y, u):
        return np.array([u[1], rhs(y, u[0], u[1])])

    ys, us, info = dopri5(f, y0, [w0, dw0], y1, rtol=rtol, atol=atol, **kw)
    if len(ys) < 2:
        raise NumericFailure("integration produced fewer than two nodes")
    with np.errstate(all="ignore"):
        d2 = np.array([rhs(y, u[0], u[1]) for y, u in zip(ys, us)])
    good = np.isfinite(us).all(axis=1) & np.isfinite(d2)
    table = ODESolutionTable(ys[good], us[good, 0], us[good, 1], d2[good], dict(info, rtol=rtol, atol=atol))
    return table


def hermite_residual(table: ODESolutionTable, rhs, n=2000):
    """Max of ``|w_h'' - rhs(y, w_h, w_h')|`` for the Hermite reconstruction
    ``w_h`` at midpoints, relative to ``max(|rhs|, 1)``."""
    y = table.y
    mid = 0.5 * (y[1:] + y[:-1])
    if mid.size > n:
        mid = mid[np.linspace(0, mid.size - 1, n).astype(int)]
    w, dw, d2 = table.w_at(mid), table.dw_at(mid), table.d2w_at(mid)
    with np.errstate(all="ignore"):
        ref = np.array([rhs(t, a, b) for t, a, b in zip(mid, w, dw)])
    return float(np.max(np.abs(d2 - ref) / np.maximum(np.abs(ref), 1.0)))

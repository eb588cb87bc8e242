"""Sine/cosine integrals and first-order Bessel functions.

Thin wrappers over :mod:`scipy.special` that enforce the real domains
used throughout the package (``ci`` and ``y1`` need ``x > 0``) and raise
:class:`~gssym.errors.DomainError` instead of returning ``nan``.
"""
import numpy as np
from scipy import special as _sp

from .errors import DomainError

EULER_GAMMA = float(np.euler_gamma)


def _check_positive(x, name):
    if np.any(np.asarray(x) <= 0):
        raise DomainError(f"{name}(x) requires x > 0")


def si(x):
    """Sine integral, ``int_0^x sin(t)/t dt``; odd in ``x``."""
    return _sp.sici(x)[0]


def ci(x):
    """Cosine integral, ``gamma + ln x + int_0^x (cos t - 1)/t dt`` for x > 0."""
    _check_positive(x, "ci")
    return _sp.sici(x)[1]


def bessel_j0(x):
    return _sp.j0(x)


def bessel_j1(x):
    return _sp.j1(x)


def bessel_y0(x):
    _check_positive(x, "y0")
    return _sp.y0(x)


def bessel_y1(x):
    _check_positive(x, "y1")
    return _sp.y1(x)


# Derivatives used by the jet layer.  For order-one Bessel functions
# C1' = C0 - C1/x and C1'' = -C1'/x - (1 - 1/x**2) C1.


def _sinc_like(x):
    # sin(x)/x with the removable singularity at 0 filled in
    return np.sinc(np.asarray(x) / np.pi)


def si_derivs(x):
    x = np.asarray(x, dtype=float)
    s = si(x)
    d1 = _sinc_like(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        d2 = np.where(x == 0.0, 0.0, (x * np.cos(x) - np.sin(x)) / (x * x))
    return _squeeze(s), _squeeze(d1), _squeeze(d2)


def ci_derivs(x):
    c = ci(x)
    x = np.asarray(x, dtype=float)
    d1 = np.cos(x) / x
    d2 = -(x * np.sin(x) + np.cos(x)) / (x * x)
    return _squeeze(c), _squeeze(d1), _squeeze(d2)


def _bessel1_derivs(c0, c1, x):
    d1 = c0 - c1 / x
    d2 = -d1 / x - (1.0 - 1.0 / (x * x)) * c1
    return d1, d2


def j1_derivs(x):
    x = np.asarray(x, dtype=float)
    c1 = bessel_j1(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        d1, d2 = _bessel1_derivs(bessel_j0(x), c1, x)
    # J1'(0) = 1/2, J1''(0) = 0
    d1 = np.where(x == 0.0, 0.5, d1)
    d2 = np.where(x == 0.0, 0.0, d2)
    return _squeeze(c1), _squeeze(d1), _squeeze(d2)


def y1_derivs(x):
    c1 = bessel_y1(x)
    x = np.asarray(x, dtype=float)
    d1, d2 = _bessel1_derivs(bessel_y0(x), c1, x)
    return _squeeze(c1), _squeeze(d1), _squeeze(d2)


def _squeeze(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a

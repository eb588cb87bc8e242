"""Second-order truncated Taylor jets in two independent variables.

A :class:`ScalarJet` carries a value together with its exact first and
second partial derivatives with respect to ``(r, z)``.  Arithmetic
propagates the derivatives with the product and chain rules, so an
expression evaluated on seeded jets yields exact derivatives up to
rounding.  All entries may be numpy arrays, in which case the jet
represents many points at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from numbers import Real

import numpy as np


@dataclass(frozen=True, slots=True)
class ScalarJet:
    value: float | np.ndarray
    d_r: float | np.ndarray = 0.0
    d_z: float | np.ndarray = 0.0
    d_rr: float | np.ndarray = 0.0
    d_rz: float | np.ndarray = 0.0
    d_zz: float | np.ndarray = 0.0

    # -- constructors -------------------------------------------------------
    @classmethod
    def constant(cls, c):
        zero = np.zeros_like(c) if isinstance(c, np.ndarray) else 0.0
        return cls(c, zero, zero, zero, zero, zero)

    @classmethod
    def seed_r(cls, r, z=None):
        """Jet of the coordinate ``r`` at ``(r, z)``."""
        r = _as_float(r)
        zero = np.zeros_like(r) if isinstance(r, np.ndarray) else 0.0
        one = np.ones_like(r) if isinstance(r, np.ndarray) else 1.0
        return cls(r, one, zero, zero, zero, zero)

    @classmethod
    def seed_z(cls, z, r=None):
        """Jet of the coordinate ``z`` at ``(r, z)``."""
        z = _as_float(z)
        zero = np.zeros_like(z) if isinstance(z, np.ndarray) else 0.0
        one = np.ones_like(z) if isinstance(z, np.ndarray) else 1.0
        return cls(z, zero, one, zero, zero, zero)

    # -- helpers ------------------------------------------------------------
    def entries(self):
        return (self.value, self.d_r, self.d_z, self.d_rr, self.d_rz, self.d_zz)

    def gradient(self):
        return self.d_r, self.d_z

    def hessian(self):
        return np.array([[self.d_rr, self.d_rz], [self.d_rz, self.d_zz]])

    def chain(self, f0, f1, f2):
        """Compose a univariate function with value ``f0``, slope ``f1`` and
        curvature ``f2`` (all evaluated at ``self.value``) with this jet."""
        return ScalarJet(
            f0,
            f1 * self.d_r,
            f1 * self.d_z,
            f2 * self.d_r * self.d_r + f1 * self.d_rr,
            f2 * self.d_r * self.d_z + f1 * self.d_rz,
            f2 * self.d_z * self.d_z + f1 * self.d_zz,
        )

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, ScalarJet):
            return ScalarJet(*(a + b for a, b in zip(self.entries(), other.entries())))
        return ScalarJet(self.value + other, self.d_r, self.d_z, self.d_rr, self.d_rz, self.d_zz)

    __radd__ = __add__

    def __neg__(self):
        return ScalarJet(*(-a for a in self.entries()))

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ScalarJet):
            return ScalarJet(*(a * other for a in self.entries()))
        u, v = self, other
        return ScalarJet(
            u.value * v.value,
            u.d_r * v.value + u.value * v.d_r,
            u.d_z * v.value + u.value * v.d_z,
            u.d_rr * v.value + 2.0 * u.d_r * v.d_r + u.value * v.d_rr,
            u.d_rz * v.value + u.d_r * v.d_z + u.d_z * v.d_r + u.value * v.d_rz,
            u.d_zz * v.value + 2.0 * u.d_z * v.d_z + u.value * v.d_zz,
        )

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.value
        inv = 1.0 / v
        return self.chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        if isinstance(other, ScalarJet):
            return self * other.reciprocal()
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, ScalarJet):
            return exp(p * log(self))
        return self.powi(p) if _is_int(p) else self.powf(p)

    def __rpow__(self, base):
        return exp(self * np.log(base))

    def powi(self, n):
        n = int(n)
        if n == 0:
            return ScalarJet.constant(np.ones_like(self.value) if isinstance(self.value, np.ndarray) else 1.0)
        x = self.value
        f0 = x**n if n > 0 else 1.0 / x ** (-n)
        f1 = n * _ipow(x, n - 1)
        f2 = n * (n - 1) * _ipow(x, n - 2)
        return self.chain(f0, f1, f2)

    def powf(self, p):
        x = self.value
        f0 = np.power(x, p)
        f1 = p * np.power(x, p - 1.0)
        f2 = p * (p - 1.0) * np.power(x, p - 2.0)
        return self.chain(f0, f1, f2)


def _ipow(x, n):
    if n == 0:
        return np.ones_like(x) if isinstance(x, np.ndarray) else 1.0
    return x**n if n > 0 else 1.0 / x ** (-n)


def _is_int(p):
    if isinstance(p, (int, np.integer)):
        return True
    if isinstance(p, Real):
        return float(p).is_integer() and abs(float(p)) < 2**31
    return False


def _as_float(x):
    if isinstance(x, np.ndarray):
        return x.astype(float)
    return float(x)


def exp(u):
    e = np.exp(u.value)
    return u.chain(e, e, e)


def log(u):
    x = u.value
    return u.chain(np.log(x), 1.0 / x, -1.0 / (x * x))


def seed(r, z):
    """Return the coordinate jets ``(r, z)`` at the given point(s)."""
    if isinstance(r, np.ndarray) or isinstance(z, np.ndarray):
        r, z = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(z, dtype=float))
    return ScalarJet.seed_r(r), ScalarJet.seed_z(z)

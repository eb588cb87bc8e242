"""Rectangular sampling grids in the poloidal plane."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class GridSpec:
    r_min: float
    r_max: float
    z_min: float
    z_max: float
    nr: int = 64
    nz: int = 64

    def __post_init__(self):
        if not (self.r_max > self.r_min and self.z_max > self.z_min):
            raise ParameterError("grid bounds must be increasing")
        if self.nr < 2 or self.nz < 2:
            raise ParameterError("grid needs at least two nodes per axis")

    @classmethod
    def from_box(cls, box, nr=64, nz=64):
        return cls(*box, nr=nr, nz=nz)

    @property
    def r(self):
        return np.linspace(self.r_min, self.r_max, self.nr)

    @property
    def z(self):
        return np.linspace(self.z_min, self.z_max, self.nz)

    @property
    def dr(self):
        return (self.r_max - self.r_min) / (self.nr - 1)

    @property
    def dz(self):
        return (self.z_max - self.z_min) / (self.nz - 1)

    def mesh(self):
        """``(R, Z)`` arrays of shape ``(nz, nr)``; rows run along ``r``."""
        return np.meshgrid(self.r, self.z)

    def refined(self):
        """Same box with the spacing halved (every old node is kept)."""
        return GridSpec(self.r_min, self.r_max, self.z_min, self.z_max, 2 * self.nr - 1, 2 * self.nz - 1)


@dataclass
class GridField:
    """psi sampled on a grid; ``valid`` marks in-domain nodes."""

    spec: GridSpec
    psi: np.ndarray
    valid: np.ndarray
    meta: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)  # further named grids such as p and I

    def __post_init__(self):
        shape = (self.spec.nz, self.spec.nr)
        self.psi = np.asarray(self.psi, dtype=float).reshape(shape)
        self.valid = np.asarray(self.valid, dtype=bool).reshape(shape) & np.isfinite(self.psi)

    @property
    def shape(self):
        return self.psi.shape

    def rows(self):
        """Flat ``(r, z, psi, valid, *extra)`` columns in row-major order."""
        R, Z = self.spec.mesh()
        psi = np.where(self.valid, self.psi, np.nan)
        cols = [R.ravel(), Z.ravel(), psi.ravel(), self.valid.ravel().astype(int)]
        cols += [np.where(self.valid, v, np.nan).ravel() for v in self.extra.values()]
        return cols


def sample_solution(sol, spec: GridSpec, psi_floor=0.0) -> GridField:
    """Evaluate a closed-form solution on a grid (NaN outside its domain)."""
    R, Z = spec.mesh()
    psi, mask = sol.values(R, Z)
    if psi_floor > 0:
        mask &= np.abs(psi) >= psi_floor
    return GridField(spec, psi, mask, meta={"family": sol.family, "params": dict(sol.params)})

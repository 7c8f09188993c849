"""Coarse propagator: first-order finite-volume compressible Euler solver.

Conserved state per cell is (rho, rho u, E) with E = rho |u|^2 / 2
+ 3 rho theta / 2 and pressure p = rho theta (monoatomic closure). Interface
fluxes are central with max-speed dissipation; the wave speed estimate is
|u_x| + sqrt(theta) on each side. An external field enters as an explicit
source on x-momentum and energy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BlowUpError, ConfigurationError
from .grid import BoundaryKind, PhaseGrid
from .moments import (ConservedField, MomentField, conserved_to_primitive,
                      primitive_to_conserved)

__all__ = [
    "FluidParams",
    "euler_flux",
    "rusanov_flux",
    "stable_dt_fluid",
    "propagate_fluid",
]

_SPAN_GUARD = 1e-12


@dataclass
class FluidParams:
    force: Optional[np.ndarray] = None  # per-cell E_i along x; None means 0
    cfl: float = 0.9


def _pressure(v: np.ndarray) -> np.ndarray:
    # p = rho theta = (E - rho |u|^2 / 2) / (3/2)
    kinetic = 0.5 * (v[..., 1] ** 2 + v[..., 2] ** 2 + v[..., 3] ** 2) / v[..., 0]
    return (v[..., 4] - kinetic) / 1.5


def euler_flux(v: np.ndarray) -> np.ndarray:
    """Physical flux of packed conserved states (..., 5) along x."""
    v = np.asarray(v, dtype=float)
    ux = v[..., 1] / v[..., 0]
    p = _pressure(v)
    out = np.empty_like(v)
    out[..., 0] = v[..., 1]
    out[..., 1] = v[..., 1] * ux + p
    out[..., 2] = v[..., 2] * ux
    out[..., 3] = v[..., 3] * ux
    out[..., 4] = ux * (v[..., 4] + p)
    return out


def rusanov_flux(vl: np.ndarray, vr: np.ndarray) -> np.ndarray:
    """Central flux with local max-speed dissipation between two states."""
    vl = np.asarray(vl, dtype=float)
    vr = np.asarray(vr, dtype=float)
    speed_l = np.abs(vl[..., 1] / vl[..., 0]) + np.sqrt(_pressure(vl) / vl[..., 0])
    speed_r = np.abs(vr[..., 1] / vr[..., 0]) + np.sqrt(_pressure(vr) / vr[..., 0])
    s = np.maximum(speed_l, speed_r)
    return 0.5 * (euler_flux(vl) + euler_flux(vr)) - 0.5 * s[..., None] * (vr - vl)


def stable_dt_fluid(V: ConservedField, grid: PhaseGrid, params: FluidParams) -> float:
    """Acoustic CFL bound cfl dx / max(|u_x| + sqrt(theta))."""
    ux = V.mom[:, 0] / V.rho
    v = V.to_array()
    theta = _pressure(v) / V.rho
    rate = float(np.max(np.abs(ux) + np.sqrt(theta)))
    return params.cfl * grid.space.dx / rate


def _ghosted(v: np.ndarray, bc: BoundaryKind) -> np.ndarray:
    ext = np.empty((v.shape[0] + 2, 5))
    ext[1:-1] = v
    if bc is BoundaryKind.PERIODIC:
        ext[0] = v[-1]
        ext[-1] = v[0]
    else:
        # transmissive: copy the boundary cell so gradients vanish at the edge
        ext[0] = v[0]
        ext[-1] = v[-1]
    return ext


def propagate_fluid(U0: MomentField, t0: float, t1: float, grid: PhaseGrid,
                    params: FluidParams, bc: BoundaryKind,
                    dt_max: float | None = None) -> MomentField:
    """Advance primitive moments from t0 to t1 on the conserved variables."""
    if t1 < t0:
        raise ConfigurationError(f"need t1 >= t0, got [{t0}, {t1}]")
    span = t1 - t0
    if span == 0.0:
        return U0
    v = primitive_to_conserved(U0).to_array()
    dx = grid.space.dx
    force = params.force
    elapsed = 0.0
    step = 0
    while span - elapsed > _SPAN_GUARD * span:
        dt = stable_dt_fluid(ConservedField.from_array(v), grid, params)
        if dt_max is not None:
            dt = min(dt, dt_max)
        dt = min(dt, span - elapsed)
        ext = _ghosted(v, bc)
        face = rusanov_flux(ext[:-1], ext[1:])
        new = v - (dt / dx) * (face[1:] - face[:-1])
        if force is not None:
            new[:, 1] += dt * v[:, 0] * force
            new[:, 4] += dt * v[:, 1] * force
        step += 1
        if not np.all(np.isfinite(new)):
            raise BlowUpError(f"fluid propagation lost finiteness at step {step}",
                              step=step)
        if np.any(new[:, 0] <= 0.0) or np.any(_pressure(new) <= 0.0):
            raise BlowUpError(f"fluid propagation left the physical regime at step {step}",
                              step=step)
        v = new
        elapsed += dt
    return conserved_to_primitive(ConservedField.from_array(v))

"""Axisymmetric star-shaped surfaces in hyperbolic space.

A surface is the graph r = phi(theta_1) over the unit sphere, rotationally
symmetric about the polar axis.  Area comes from the induced metric
(phi'^2 + psi(phi)^2) dtheta^2 + (psi(phi) sin theta)^2 on the orbit sphere;
the mean curvature field comes from the pointwise first variation of the
area element under the outward unit-normal flow, by central differencing of
the flowed area element.  Positive mean curvature means curved toward the
inside, matching the coordinate-sphere value (n-1) kappa coth(kappa r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .core import _kval, unit_sphere_volume

__all__ = ["StarSurface", "star_surface_geometry", "coordinate_sphere"]

GRID_POINTS = 2049


@dataclass(frozen=True)
class StarSurface:
    """Radial support function of an axisymmetric star-shaped surface."""

    phi: Callable[[float], float]
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"dimension must be >= 3, got {self.n}")


def coordinate_sphere(r: float, n: int) -> StarSurface:
    return StarSurface(phi=lambda t: r, n=n)


def star_surface_geometry(surface: StarSurface, kappa=1.0, step_scale: float = 1e-4):
    """Area and pointwise mean curvature field of the surface.

    Returns (area, thetas, h_field, area_element) where h_field[i] is the
    mean curvature at polar angle thetas[i] and area_element the unflowed
    area density (useful for integrating fields over the surface).

    The field is the symmetric difference of the log-area element under the
    coordinate-linear flow with the outward unit normal as initial velocity;
    the first variation only sees the initial velocity, so the straight-line
    step is as good as the geodesic one at this order.
    """
    k = _kval(kappa)
    n = surface.n
    t = np.linspace(0.0, math.pi, GRID_POINTS)
    phi = np.array([float(surface.phi(x)) for x in t])
    if np.any(phi <= 0.0):
        raise ValueError("the radial support function must be positive")
    dphi = np.gradient(phi, t, edge_order=2)

    def psi(r):
        return np.sinh(k * r) / k

    # Outward unit normal components in the (r, theta) plane.
    speed = np.sqrt(dphi**2 + psi(phi) ** 2)
    nu_r = psi(phi) / speed
    nu_t = -dphi / (psi(phi) * speed)

    def element(rr, tt):
        drdt = np.gradient(rr, t, edge_order=2)
        dtdt = np.gradient(tt, t, edge_order=2)
        return np.sqrt(drdt**2 + psi(rr) ** 2 * dtdt**2) * (
            psi(rr) * np.abs(np.sin(tt))
        ) ** (n - 2)

    j0 = element(phi, t)
    eps = step_scale * phi
    j_plus = element(phi + eps * nu_r, t + eps * nu_t)
    j_minus = element(phi - eps * nu_r, t - eps * nu_t)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = (j_plus - j_minus) / (2.0 * eps * j0)
    # The area density vanishes at the poles; fill the endpoints from the
    # neighbors (the sin^(n-2) weight kills them in every integral anyway).
    h[0] = h[1]
    h[-1] = h[-2]

    area = unit_sphere_volume(n - 1) * simpson(j0, x=t)
    return area, t, h, j0


def surface_integral(surface: StarSurface, values, thetas, area_element, kappa=1.0):
    """Integrate a sampled field over the surface with its area measure."""
    return unit_sphere_volume(surface.n - 1) * simpson(values * area_element, x=thetas)

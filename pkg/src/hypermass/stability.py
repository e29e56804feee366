"""Level-set volume growth, the comparison ODE, and the height bound.

The level-set volume of a monotone radial profile is a coordinate-sphere
area, so its height derivative is analytic through the inverse function.
The growth inequalities bound that derivative below by mass terms; feeding
the sharpened bound into a comparison ODE with finite blow-up height turns
them into an explicit bound on how far the graph can rise above its
normalization height.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .core import _kval, lapse, mass_constant, sphere_area, unit_sphere_volume
from .curvature import EPS_REGULAR, level_set_mean_curvature
from .errors import HypothesisViolation, RegularityError, ZeroMassError
from .mass import invert_height, mass_boundary_limit
from .profiles import RadialProfile, rescale
from .surfaces import StarSurface, star_surface_geometry, surface_integral

__all__ = [
    "volume_function",
    "volume_derivative",
    "H0Result",
    "compute_h0",
    "minkowski_check",
    "volume_growth_check",
    "sharpened_growth_check",
    "OdeSolution",
    "ode_comparison",
    "comparison_property",
    "StabilityReport",
    "height_bound_check",
]

DEFAULT_BETA = 2.0


# ---------------------------------------------------------------------------
# Level-set volume
# ---------------------------------------------------------------------------


def volume_function(profile: RadialProfile, kappa=1.0, h: float = 0.0) -> float:
    """Volume of the level set {f = h}: the coordinate-sphere area at f^{-1}(h).

    Below the inner value the level set is frozen at the inner boundary
    sphere for profiles with a horizon, and empty (volume zero) for entire
    profiles.
    """
    k = _kval(kappa)
    inner = profile.inner_value() if not profile.is_entire else profile.f(0.0)
    if h <= inner:
        if profile.is_entire:
            return 0.0
        return sphere_area(profile.domain_start, k, profile.n)
    r_h = invert_height(profile, h)
    return sphere_area(r_h, k, profile.n)


def volume_derivative(profile: RadialProfile, kappa=1.0, h: float = 0.0) -> float:
    """d/dh of the level-set volume, analytic through the inverse function.

    The area ratio d(area)/dr equals the level mean curvature times the
    area, and dr/dh = 1/f'.
    """
    k = _kval(kappa)
    r_h = invert_height(profile, h)
    fp = profile.f_prime(r_h)
    if abs(fp) <= EPS_REGULAR:
        raise RegularityError(f"h={h} is not a regular value")
    area = sphere_area(r_h, k, profile.n)
    return level_set_mean_curvature(r_h, k, profile.n) * area / fp


# ---------------------------------------------------------------------------
# Normalization height
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class H0Result:
    """Normalization height with its threshold; ``clamped`` marks the case
    where the threshold never exceeds the inner boundary volume."""

    h0: float
    threshold: float
    mass: float
    clamped: bool = False


def compute_h0(profile: RadialProfile, beta: float = DEFAULT_BETA) -> H0Result:
    """Height where the unit-scale level volume reaches the mass threshold.

    threshold = 2 beta omega * max(m^((n-1)/(n-2)), m).  The level volume of
    a monotone radial profile is omega sinh^(n-1)(r), so the threshold radius
    is closed-form and h0 is just the profile value there.
    """
    if beta <= 1.0:
        raise ValueError(f"beta must exceed 1, got {beta}")
    n = profile.n
    m = mass_boundary_limit(profile, 1.0)
    if m <= 0.0:
        raise ZeroMassError(f"threshold undefined for mass {m}")
    omega = unit_sphere_volume(n)
    threshold = 2.0 * beta * omega * max(m ** ((n - 1) / (n - 2)), m)
    r_star = math.asinh((threshold / omega) ** (1.0 / (n - 1)))
    if r_star <= profile.domain_start:
        return H0Result(
            h0=profile.inner_value(), threshold=threshold, mass=m, clamped=True
        )
    return H0Result(h0=profile.f(r_star), threshold=threshold, mass=m, clamped=False)


# ---------------------------------------------------------------------------
# Inequalities
# ---------------------------------------------------------------------------


def minkowski_check(surface, kappa=1.0, tol: float = 1e-10):
    """Weighted total mean curvature against the area lower bound.

    lhs = (1/c_n) * integral of H V over the surface, rhs = area/(2 omega);
    returns (lhs, rhs, margin).  Accepts a StarSurface or a bare coordinate
    sphere radius.  Raises HypothesisViolation when the surface is not
    mean-convex on the grid.
    """
    k = _kval(kappa)
    if isinstance(surface, StarSurface):
        n = surface.n
        area, thetas, h_field, j0 = star_surface_geometry(surface, k)
        bad = np.nonzero(h_field < -1e-6)[0]
        if bad.size:
            i = int(bad[0])
            raise HypothesisViolation(
                f"surface is not mean-convex at theta={thetas[i]:.4f}",
                where=float(thetas[i]),
                value=float(h_field[i]),
            )
        v_field = np.array([lapse(surface.phi(t), k) for t in thetas])
        lhs = surface_integral(surface, h_field * v_field, thetas, j0, k) / mass_constant(n)
    else:
        raise TypeError("surface must be a StarSurface; wrap spheres via coordinate_sphere")
    rhs = area / (2.0 * unit_sphere_volume(n))
    return lhs, rhs, lhs - rhs


def sphere_minkowski_closed_form(r: float, kappa=1.0, n: int = 3):
    """Closed-form (lhs, rhs) of the weighted-curvature bound on a coordinate sphere."""
    k = _kval(kappa)
    lhs = (
        level_set_mean_curvature(r, k, n)
        * lapse(r, k)
        * sphere_area(r, k, n)
        / mass_constant(n)
    )
    rhs = sphere_area(r, k, n) / (2.0 * unit_sphere_volume(n))
    return lhs, rhs


def volume_growth_check(
    profile: RadialProfile, kappa=1.0, h: float = 0.0, alpha: float = 1.0
) -> float:
    """Residual of the volume-growth inequality at weight alpha.

    d(volume)/dh >= (1/alpha) [ integral of H V over the level set
                                - (1 + alpha^-2) c_n m ].
    """
    if not alpha > 0.0:
        raise ValueError("alpha must be positive")
    k = _kval(kappa)
    n = profile.n
    lhs = volume_derivative(profile, k, h)
    r_h = invert_height(profile, h)
    curv_integral = (
        level_set_mean_curvature(r_h, k, n) * lapse(r_h, k) * sphere_area(r_h, k, n)
    )
    m = mass_boundary_limit(profile, k)
    rhs = (curv_integral - (1.0 + alpha**-2) * mass_constant(n) * m) / alpha
    return lhs - rhs


def sharpened_growth_check(profile: RadialProfile, kappa=1.0, h: float = 0.0) -> float:
    """Residual of the optimized growth inequality.

    d(volume)/dh >= c_n (2m/(3 sqrt 3)) (volume/(2 omega m) - 1)^(3/2),
    valid when the level volume exceeds c_n m/(n-1) = 2 omega m.
    """
    k = _kval(kappa)
    n = profile.n
    m = mass_boundary_limit(profile, k)
    if m <= 0.0:
        raise HypothesisViolation(f"sharpened bound needs positive mass, got {m}")
    vol = volume_function(profile, k, h)
    if vol <= mass_constant(n) * m / (n - 1):
        raise HypothesisViolation(
            f"level volume {vol:.6g} below the threshold {mass_constant(n) * m / (n - 1):.6g}",
            where=h,
            value=vol,
        )
    lhs = volume_derivative(profile, k, h)
    omega = unit_sphere_volume(n)
    rhs = (
        mass_constant(n)
        * (2.0 * m / (3.0 * math.sqrt(3.0)))
        * (vol / (2.0 * omega * m) - 1.0) ** 1.5
    )
    return lhs - rhs


# ---------------------------------------------------------------------------
# Comparison ODE
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OdeSolution:
    """Numeric solution of the comparison ODE with its blow-up height."""

    beta: float
    n: int
    samples: list
    blowup_height: float
    closed_form_blowup: float

    @property
    def blowup_residual(self) -> float:
        return abs(self.blowup_height - self.closed_form_blowup)


def _rk4_step(fun, h, y, dt):
    k1 = fun(y)
    k2 = fun(y + 0.5 * dt * k1)
    k3 = fun(y + 0.5 * dt * k2)
    k4 = fun(y + dt * k3)
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def ode_comparison(
    n: int,
    beta: float,
    cap: Optional[float] = None,
    targets=None,
    rel_tol: float = 1e-10,
) -> OdeSolution:
    """Integrate Y' = c_n (2/(3 sqrt 3)) (Y/(2 omega) - 1)^(3/2), Y(0) = 2 beta omega.

    Adaptive step doubling/halving; blow-up is declared at Y > cap and the
    remaining height is closed by the analytic tail (2 omega u with
    u = Y/(2 omega) - 1 blows up after 3 sqrt 3 / ((n-1) sqrt u) more height).
    The independently derived closed form of the separable equation puts the
    blow-up at 3 sqrt 3 / ((n-1) sqrt(beta - 1)); the numeric value must land
    within 1e-4 of it.

    ``targets`` requests exact sample heights (steps are clipped to land on
    them), e.g. for pointwise comparison against a volume curve.
    """
    if beta <= 1.0:
        raise ValueError(f"beta must exceed 1 for blow-up, got {beta}")
    nn = n.n if hasattr(n, "n") else int(n)
    omega = unit_sphere_volume(nn)
    c_n = mass_constant(nn)
    cap = cap if cap is not None else 1e9 * omega

    def rhs(y):
        u = y / (2.0 * omega) - 1.0
        return c_n * (2.0 / (3.0 * math.sqrt(3.0))) * u**1.5

    closed = 3.0 * math.sqrt(3.0) / ((nn - 1) * math.sqrt(beta - 1.0))
    targets = sorted(t for t in (targets or [])) or None

    h = 0.0
    y = 2.0 * beta * omega
    dt = 1e-3 * closed
    samples = [(0.0, y)]
    next_target = 0

    def skip_passed_targets(idx):
        while targets and idx < len(targets) and targets[idx] <= h + 1e-13:
            idx += 1
        return idx

    next_target = skip_passed_targets(next_target)
    while y <= cap:
        if dt < 1e-15:
            break
        step = dt
        landing = None
        if targets and next_target < len(targets):
            gap = targets[next_target] - h
            if 0.0 < gap <= step:
                step = gap
                landing = targets[next_target]
        y_full = _rk4_step(rhs, h, y, step)
        y_half = _rk4_step(rhs, h, _rk4_step(rhs, h, y, 0.5 * step), 0.5 * step)
        err = abs(y_half - y_full)
        scale = rel_tol * max(abs(y_half), 1.0)
        if math.isfinite(err) and err <= scale:
            h = landing if landing is not None else h + step
            y = y_half
            samples.append((h, y))
            next_target = skip_passed_targets(next_target)
            if err < 0.01 * scale and landing is None:
                dt *= 2.0
        else:
            dt = 0.5 * step
    u_end = y / (2.0 * omega) - 1.0
    tail = 3.0 * math.sqrt(3.0) / ((nn - 1) * math.sqrt(u_end))
    return OdeSolution(
        beta=beta,
        n=nn,
        samples=samples,
        blowup_height=h + tail,
        closed_form_blowup=closed,
    )


def ode_value_at(solution: OdeSolution, h: float) -> float:
    """Sampled ODE value at a requested height (must be one of the targets)."""
    for hs, ys in solution.samples:
        if math.isclose(hs, h, rel_tol=0.0, abs_tol=1e-12):
            return ys
    raise KeyError(f"height {h} was not a sample target")


def comparison_property(
    profile: RadialProfile,
    kappa=None,
    beta: float = DEFAULT_BETA,
    grid_points: int = 40,
    tol_scale: float = 1e-6,
):
    """Pointwise domination of the comparison ODE by the zoomed volume curve.

    Rescales the profile by kappa = m^(1/(n-2)) about its normalization
    height (making its zoomed mass one and its volume at height zero at
    least 2 beta omega), then checks Y(h) <= volume(h) + tol on a shared
    grid up to just below the smaller of the blow-up height and the zoomed
    height limit.  Returns (ok, grid, ode_values, volume_values).
    """
    n = profile.n
    m = mass_boundary_limit(profile, 1.0)
    if m <= 0.0:
        raise ZeroMassError("comparison needs positive mass")
    k = m ** (1.0 / (n - 2))
    if kappa is not None and not math.isclose(_kval(kappa), k, rel_tol=1e-9):
        raise ValueError(f"kappa must be the mass power {k}, got {kappa}")
    h0 = compute_h0(profile, beta)
    zoomed = rescale(profile, h0.h0, k)
    closed = 3.0 * math.sqrt(3.0) / ((n - 1) * math.sqrt(beta - 1.0))
    sup_reachable = (profile.f(40.0) - h0.h0) / k
    h_end = min(0.95 * closed, 0.98 * sup_reachable)
    grid = list(np.linspace(0.0, h_end, grid_points))
    solution = ode_comparison(n, beta, targets=grid)
    ode_vals = [ode_value_at(solution, h) for h in grid]
    vol_vals = [volume_function(zoomed, k, h) for h in grid]
    ok = all(y <= v + tol_scale * v for y, v in zip(ode_vals, vol_vals))
    return ok, grid, ode_vals, vol_vals


# ---------------------------------------------------------------------------
# Height bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    n: int
    beta: float
    m: float
    h0: float
    sup_f: float
    C: float
    bound: float
    verdict: bool
    ode: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def height_bound_check(
    profile: RadialProfile, beta: float = DEFAULT_BETA
) -> StabilityReport:
    """0 < sup f - h0 < C m^(1/(n-2)) with C the ODE blow-up height.

    The constant profile degenerates to sup f = h0 and reports a false
    verdict (the rigidity case), which callers treat as expected.
    """
    n = profile.n
    m = mass_boundary_limit(profile, 1.0)
    if m <= 0.0:
        raise ZeroMassError("height bound needs positive mass")
    h0 = compute_h0(profile, beta)
    sup_f = profile.height_limit()
    solution = ode_comparison(n, beta)
    c = solution.blowup_height
    bound = c * m ** (1.0 / (n - 2))
    rise = sup_f - h0.h0
    verdict = 0.0 < rise < bound
    return StabilityReport(
        n=n,
        beta=beta,
        m=m,
        h0=h0.h0,
        sup_f=sup_f,
        C=c,
        bound=bound,
        verdict=verdict,
        ode={
            "blowup_numeric": solution.blowup_height,
            "blowup_closed": solution.closed_form_blowup,
        },
    )

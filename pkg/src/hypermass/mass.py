"""Mass invariants of radial graphs and the inequalities tying them together.

Three independent evaluations of the same number: the boundary-integral
limit on a geometric radius ladder, the level-set split into a bulk
curvature integral plus a horizon-sphere term, and a brute-force evaluation
of the four-term surface integrand.  The reports carry their residuals so a
disagreement is visible, not silently averaged away.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

from scipy.integrate import quad

from .core import (
    _kval,
    kappa_coth,
    lapse,
    mass_constant,
    quad_improper,
    sphere_area,
    sphere_radius_factor,
    unit_sphere_volume,
)
from .curvature import EPS_REGULAR, scalar_curvature
from .errors import (
    EntireProfileError,
    HypothesisViolation,
    NonConvergenceError,
    RegularityError,
)
from .profiles import BoundaryKind, RadialProfile, rescale

__all__ = [
    "MassReport",
    "limit_on_ladder",
    "mass_integrand_reduced",
    "mass_integrand_direct",
    "mass_boundary_limit",
    "mass_functional_lapse",
    "mass_level_set",
    "pmt_check",
    "penrose_bound",
    "mass_scaling_check",
    "invert_height",
]

R_LADDER_MIN = 5.0
R_LADDER_RUNGS = 6


@dataclass(frozen=True)
class MassReport:
    """The two-route mass evaluation at a level value h."""

    m_boundary: float
    m_levelset_bulk: float
    m_levelset_boundary: float
    m_levelset_total: float
    h_used: float
    residual_identity: float
    kappa: float
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def _aitken(y0: float, y1: float, y2: float) -> float:
    denom = (y2 - y1) - (y1 - y0)
    if denom == 0.0:
        return y2
    return y2 - (y2 - y1) ** 2 / denom


def limit_on_ladder(
    g,
    r_min: float = R_LADDER_MIN,
    rungs: int = R_LADDER_RUNGS,
    rel_tol: float = 1e-11,
    abs_tol: float = 1e-13,
):
    """Limit of g(r) as r -> inf along the doubling ladder r_min * 2^k.

    Exponentially converging values square their error each rung, so the
    Aitken update of three consecutive rungs extrapolates the limit; the
    ladder stops as soon as successive extrapolants (or raw rungs) agree, so
    far rungs whose integrands underflow are never evaluated.  Returns
    (limit, error_estimate, rungs_used).
    """
    values = []
    extrapolants = []
    for k in range(rungs):
        v = g(r_min * 2.0**k)
        if not math.isfinite(v):
            if len(values) >= 2 and abs(values[-1] - values[-2]) <= max(
                abs_tol, rel_tol * abs(values[-1])
            ):
                return values[-1], abs(values[-1] - values[-2]), k
            raise NonConvergenceError(
                f"ladder value non-finite at r={r_min * 2.0 ** k} before convergence"
            )
        values.append(v)
        if len(values) >= 2:
            raw_gap = abs(values[-1] - values[-2])
            if raw_gap <= max(abs_tol, rel_tol * abs(values[-1])):
                return values[-1], raw_gap, k + 1
        if len(values) >= 3:
            extrapolants.append(_aitken(*values[-3:]))
        if len(extrapolants) >= 2:
            gap = abs(extrapolants[-1] - extrapolants[-2])
            if gap <= max(abs_tol, rel_tol * abs(extrapolants[-1])):
                return extrapolants[-1], gap, k + 1
    if extrapolants:
        gap = abs(extrapolants[-1] - values[-1])
        if gap <= max(math.sqrt(abs_tol), math.sqrt(rel_tol) * abs(extrapolants[-1])):
            return extrapolants[-1], gap, rungs
    raise NonConvergenceError("radius ladder did not Cauchy-converge within the cap")


def mass_integrand_reduced(profile: RadialProfile, kappa, r: float) -> float:
    """Radial reduction of the surface-integral mass: (1/2) V^4 psi^(n-2) f'^2.

    Grouped as (V^2 psi^((n-2)/2) f')^2 / 2, which stays bounded along the
    ladder while the bare factors overflow/underflow.
    """
    k = _kval(kappa)
    t = (
        lapse(r, k) ** 2
        * sphere_radius_factor(r, k) ** ((profile.n - 2) / 2.0)
        * profile.f_prime(r)
    )
    return 0.5 * t * t


def mass_integrand_direct(profile: RadialProfile, kappa, r: float) -> float:
    """Brute-force mass integrand: the four surface terms over the mass constant.

    Evaluates V(div e - d tr e)(dr) + (tr e) dV(dr) - e(grad V, dr) piece by
    piece for e = V^2 df x df, times the sphere area, divided by 2(n-1)w.
    No cancellations are folded in by hand; this is the oracle the reduced
    path is tested against.
    """
    k = _kval(kappa)
    n = profile.n
    v = lapse(r, k)
    dv = k * math.sinh(k * r)
    fp = profile.f_prime(r)
    fpp = profile.f_double_prime(r)
    phi = v * v * fp * fp  # e_rr = trace of e
    phi_prime = 2.0 * v * dv * fp * fp + 2.0 * v * v * fp * fpp
    div_e_r = phi_prime + (n - 1) * kappa_coth(r, k) * phi
    dtr_e_r = phi_prime
    tr_e_dv = phi * dv
    e_gradv_r = v * v * (fp * dv) * fp
    total = v * (div_e_r - dtr_e_r) + tr_e_dv - e_gradv_r
    return total * sphere_area(r, k, n) / mass_constant(n)


def mass_boundary_limit(
    profile: RadialProfile,
    kappa=1.0,
    r_min: float = R_LADDER_MIN,
    rungs: int = R_LADDER_RUNGS,
    rel_tol: float = 1e-11,
) -> float:
    """Mass of the graph from the boundary-integral limit at scale kappa."""
    k = _kval(kappa)
    value, _err, _used = limit_on_ladder(
        lambda r: mass_integrand_reduced(profile, k, r),
        r_min=r_min,
        rungs=rungs,
        rel_tol=rel_tol,
    )
    return value


def mass_functional_lapse(profile: RadialProfile, basis) -> float:
    """Surface-integral mass functional against one lapse basis element.

    Index 0 reproduces the mass times the normalizing constant.  For the
    x^i sinh(r) elements the radial factor converges but the angular average
    of the coordinate function over the sphere vanishes, so radial profiles
    are balanced; the average is integrated numerically rather than assumed.
    """
    n = profile.n
    if basis.index == 0:
        return mass_constant(n) * mass_boundary_limit(profile, 1.0)

    def radial_factor(r):
        v = lapse(r, 1.0)
        w = v * profile.f_prime(r) * math.sinh(r) ** ((n - 1) / 2.0)
        return (n - 1) * w * w / math.sinh(r) ** (n - 2)

    limit, _err, _used = limit_on_ladder(radial_factor, rel_tol=1e-9)
    # Average of one coordinate function over the unit sphere, reduced to the
    # polar angle; zero by parity, computed over the two half-ranges rather
    # than asserted.
    front, _ = quad(lambda t: math.cos(t) * math.sin(t) ** (n - 2), 0.0, math.pi / 2)
    back, _ = quad(lambda t: math.cos(t) * math.sin(t) ** (n - 2), math.pi / 2, math.pi)
    return limit * unit_sphere_volume(n - 1) * (front + back)


def invert_height(
    profile: RadialProfile, h: float, r_tol: float = 1e-12, r_cap: float = 700.0
) -> float:
    """Radius where the increasing profile passes through height h, by bisection."""
    lo = profile.domain_start + max(1e-14, 1e-14 * profile.domain_start)
    if profile.is_entire:
        lo = 0.0
    f_lo = profile.f(lo) if profile.is_entire else profile.inner_value()
    if h <= f_lo:
        raise RegularityError(f"height {h} at or below the inner value {f_lo}")
    hi = max(1.0, 2.0 * profile.domain_start, 2.0 * lo)
    while profile.f(hi) < h:
        hi *= 2.0
        if hi > r_cap:
            raise NonConvergenceError(
                f"height {h} not reached below r={r_cap}; too close to the limit"
            )
    while hi - lo > r_tol:
        mid = 0.5 * (lo + hi)
        if profile.f(mid) < h:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def mass_level_set(
    profile: RadialProfile,
    kappa=1.0,
    h: float = 0.0,
    eps_regular: float = EPS_REGULAR,
    rel_tol: float = 1e-9,
) -> MassReport:
    """Mass split through the level set at height h: bulk + boundary.

    bulk     = integral of (shifted scalar curvature) * V * sphere area over
               radii above the level radius, over the mass constant;
    boundary = V * H * (V^2 f'^2 / (1 + V^2 f'^2)) * area at the level
               radius, over the mass constant.

    Their sum reproduces the boundary-limit mass for every regular h; the
    report carries the residual.
    """
    k = _kval(kappa)
    n = profile.n
    r_h = invert_height(profile, h)
    fp = profile.f_prime(r_h)
    if abs(fp) <= eps_regular:
        raise RegularityError(f"h={h} is not regular: |f'({r_h})| = {abs(fp):.2e}")
    c_n = mass_constant(n)

    def bulk_integrand(r):
        _, curly = scalar_curvature(profile, k, r)
        return curly * lapse(r, k) * sphere_area(r, k, n) / c_n

    d = profile.decay_rate
    hint = min(2.0 * k, d - n * k) if d > n * k else 2.0 * k
    bulk = quad_improper(bulk_integrand, r_h, decay_hint=hint, abs_tol=1e-12, rel_tol=rel_tol)

    v = lapse(r_h, k)
    w = v * v * fp * fp
    boundary = (
        v
        * (n - 1)
        * kappa_coth(r_h, k)
        * (w / (1.0 + w))
        * sphere_area(r_h, k, n)
        / c_n
    )
    m_boundary = mass_boundary_limit(profile, k)
    total = bulk + boundary
    return MassReport(
        m_boundary=m_boundary,
        m_levelset_bulk=bulk,
        m_levelset_boundary=boundary,
        m_levelset_total=total,
        h_used=h,
        residual_identity=abs(total - m_boundary),
        kappa=k,
    )


def pmt_check(
    profile: RadialProfile,
    kappa=1.0,
    h: float = 0.0,
    grid=None,
    tol: float = 1e-8,
) -> bool:
    """Non-negativity of the mass under the curvature lower bound.

    Verifies the hypothesis (shifted scalar curvature >= -tol on the grid)
    and then checks mass >= level-set boundary term - tol and mass >= -tol.
    Raises HypothesisViolation with the first bad grid point otherwise.
    """
    k = _kval(kappa)
    if grid is None:
        import numpy as np

        grid = profile.domain_start + np.logspace(-2, 1.5, 60)
    for r in grid:
        _, curly = scalar_curvature(profile, k, r)
        if curly < -tol:
            raise HypothesisViolation(
                f"shifted scalar curvature {curly:.3e} < -{tol} at r={r}",
                where=float(r),
                value=float(curly),
            )
    report = mass_level_set(profile, k, h)
    if report.m_boundary < -tol:
        return False
    return report.m_boundary >= report.m_levelset_boundary - max(
        tol, 1e-6 * max(1.0, abs(report.m_boundary))
    )


def penrose_bound(profile: RadialProfile, kappa=1.0):
    """Mass against the horizon-area lower bound, as (mass, bound, ratio).

    bound = V(r0) |inner sphere| / (2 omega); only profiles with a minimal
    inner boundary qualify.
    """
    if profile.boundary_kind is not BoundaryKind.MINIMAL_BOUNDARY:
        raise EntireProfileError("the horizon bound needs a minimal inner boundary")
    k = _kval(kappa)
    n = profile.n
    r0 = profile.domain_start
    bound = lapse(r0, k) * sphere_area(r0, k, n) / (2.0 * unit_sphere_volume(n))
    m = mass_boundary_limit(profile, k)
    return m, bound, m / bound


def mass_scaling_check(profile: RadialProfile, h0: float, kappa):
    """Mass of the zoomed profile against the predicted power law.

    Returns (measured, predicted) where predicted = m / kappa^(n-2); the two
    agree to ladder accuracy.
    """
    k = _kval(kappa)
    zoomed = rescale(profile, h0, k)
    measured = mass_boundary_limit(zoomed, k, r_min=R_LADDER_MIN / min(1.0, k))
    predicted = mass_boundary_limit(profile, 1.0) / k ** (profile.n - 2)
    return measured, predicted

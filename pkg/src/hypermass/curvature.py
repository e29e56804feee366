"""Curvature of radial graphs: scalar curvature, mean curvatures, comparisons.

Two independent routes compute the graph scalar curvature: the contracted
second-derivative expression evaluated term by term, and a warped-product
formula applied to the induced metric with finite-difference coefficient
derivatives.  They agree to quadrature accuracy on smooth profiles and both
return the constant -n(n-1) for the exact family.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass

from .core import _kval, kappa_coth, radial_calculus
from .errors import DomainError, RegularityError
from .profiles import RadialProfile

__all__ = [
    "RadialContractions",
    "contractions",
    "scalar_curvature",
    "warped_scalar_oracle",
    "graph_mean_curvature",
    "unit_graph_mean_curvature",
    "upward_check",
    "mean_curvature_comparison_check",
    "level_set_mean_curvature",
    "sign_fault_injected",
]

EPS_REGULAR = 1e-8

# Mutation smoke-test hook: flips one sign in the scalar-curvature bracket so
# the oracle-equivalence suite can prove it would catch a transcription slip.
_SIGN_FAULT = False


@contextmanager
def sign_fault_injected():
    global _SIGN_FAULT
    _SIGN_FAULT = True
    try:
        yield
    finally:
        _SIGN_FAULT = False


@dataclass(frozen=True)
class RadialContractions:
    """Metric contractions of df, dV and Hess f entering the curvature bracket."""

    grad_sq: float
    laplacian: float
    hess_sq: float
    hess_grad_sq: float
    hess_df_df: float
    df_dv: float
    dv_sq: float
    hess_df_dv: float


def contractions(profile: RadialProfile, r: float, kappa=1.0) -> RadialContractions:
    """All scalar contractions for a radial profile at radius r.

    For radial f the only nonzero Hessian slots are f'' (radial) and
    kappa*coth(kappa r)*f' (tangential), and dV = kappa*sinh(kappa r) dr.
    """
    k = _kval(kappa)
    calc = radial_calculus(profile, r, k)
    fp = profile.f_prime(r)
    fpp = calc.hess_rr
    dv = k * math.sinh(k * r)
    return RadialContractions(
        grad_sq=fp * fp,
        laplacian=calc.laplacian,
        hess_sq=fpp * fpp + (profile.n - 1) * calc.hess_tan**2,
        hess_grad_sq=fpp * fpp * fp * fp,
        hess_df_df=fpp * fp * fp,
        df_dv=fp * dv,
        dv_sq=dv * dv,
        hess_df_dv=fpp * fp * dv,
    )


def scalar_curvature(profile: RadialProfile, kappa=1.0, r: float = 1.0):
    """Scalar curvature of the graph, returned as (R, R + kappa^2 n(n-1)).

    The second entry is the shifted curvature that is non-negative exactly
    when the graph satisfies the curvature lower bound of the model.
    """
    k = _kval(kappa)
    n = profile.n
    c = contractions(profile, r, k)
    v = math.cosh(k * r)
    v2 = v * v
    w = 1.0 + v2 * c.grad_sq
    last_sign = 4.0 if _SIGN_FAULT else -4.0
    bracket = (
        c.laplacian**2
        - c.hess_sq
        + (2.0 * v2 / w) * (c.hess_grad_sq - c.laplacian * c.hess_df_df)
        + (2.0 * c.df_dv / (v * w)) * (c.laplacian - v2 * c.hess_df_df + c.df_dv / v)
        + 2.0 * (c.df_dv / v) * c.laplacian
        - (2.0 / w) * c.grad_sq * (c.dv_sq / v2)
        + (last_sign / (w * v)) * c.hess_df_dv
    )
    curly = (v2 / w) * bracket
    return curly - k * k * n * (n - 1), curly


def _induced_coefficient(profile: RadialProfile, r: float, k: float) -> float:
    """g_rr of the induced graph metric: 1 + V^2 f'^2."""
    fp = profile.f_prime(r)
    v = math.cosh(k * r)
    return 1.0 + v * v * fp * fp


def warped_scalar_oracle(profile: RadialProfile, kappa=1.0, r: float = 1.0) -> float:
    """Scalar curvature of the induced metric A(r) dr^2 + psi(r)^2 sigma.

    Independent of the contracted route: uses the one-dimensional-base
    warped-product formula

        R = -2(n-1) [psi''/(A psi) - psi' A' / (2 A^2 psi)]
            + (n-1)(n-2) [1/psi^2 - psi'^2/(A psi^2)]

    with A and psi differentiated by central finite differences whose step
    shrinks with the distance to the inner boundary (A blows up there).
    """
    k = _kval(kappa)
    n = profile.n
    if not r > profile.domain_start:
        raise DomainError(f"r={r} is outside ({profile.domain_start}, inf)")
    gap = r - profile.domain_start
    # A blows up at the inner boundary, so its step scales with the gap;
    # psi is smooth everywhere and keeps a step balancing truncation
    # against the second-difference roundoff.  Five-point central stencils
    # keep the truncation error below the small-radius 1/psi^2 amplification.
    ha = 1e-4 * min(1.0, 0.25 * gap)
    hp = 1e-3

    def psi(x):
        return math.sinh(k * x) / k

    def diff5(fun, x, h):
        return (
            fun(x - 2 * h) - 8.0 * fun(x - h) + 8.0 * fun(x + h) - fun(x + 2 * h)
        ) / (12.0 * h)

    def diff5_second(fun, x, h):
        return (
            -fun(x - 2 * h)
            + 16.0 * fun(x - h)
            - 30.0 * fun(x)
            + 16.0 * fun(x + h)
            - fun(x + 2 * h)
        ) / (12.0 * h * h)

    a0 = _induced_coefficient(profile, r, k)
    ap = diff5(lambda x: _induced_coefficient(profile, x, k), r, ha)
    p0 = psi(r)
    pp = diff5(psi, r, hp)
    ppp = diff5_second(psi, r, hp)
    return -2.0 * (n - 1) * (ppp / (a0 * p0) - pp * ap / (2.0 * a0 * a0 * p0)) + (
        n - 1
    ) * (n - 2) * (1.0 / p0**2 - pp * pp / (a0 * p0 * p0))


def graph_mean_curvature(profile: RadialProfile, kappa=1.0, r: float = 1.0) -> float:
    """Upward-component mean curvature expression of the graph (sign-normalized).

    This is the contracted operator whose sign decides whether the mean
    curvature vector points upward; it equals the unit-normal mean curvature
    times the positive weight V/sqrt(1 + V^2 f'^2).  The sign convention
    makes the unit coordinate sphere positively curved toward its inside.
    """
    k = _kval(kappa)
    n = profile.n
    if not r > profile.domain_start:
        raise DomainError(f"r={r} is outside ({profile.domain_start}, inf)")
    fp = profile.f_prime(r)
    fpp = profile.f_double_prime(r)
    v = math.cosh(k * r)
    dv = k * math.sinh(k * r)
    w = 1.0 + v * v * fp * fp
    radial_slot = fpp + 2.0 * fp * dv / v + v * dv * fp**3
    tangential = (n - 1) * kappa_coth(r, k) * fp
    return (v * v / w) * (radial_slot / w + tangential)


def unit_graph_mean_curvature(profile: RadialProfile, kappa=1.0, r: float = 1.0) -> float:
    """Mean curvature of the graph with respect to the upward unit normal."""
    k = _kval(kappa)
    n = profile.n
    if not r > profile.domain_start:
        raise DomainError(f"r={r} is outside ({profile.domain_start}, inf)")
    fp = profile.f_prime(r)
    fpp = profile.f_double_prime(r)
    v = math.cosh(k * r)
    dv = k * math.sinh(k * r)
    w = 1.0 + v * v * fp * fp
    radial_slot = fpp + 2.0 * fp * dv / v + v * dv * fp**3
    return v * radial_slot / w**1.5 + (n - 1) * kappa_coth(r, k) * v * fp / math.sqrt(w)


def upward_check(profile: RadialProfile, kappa=1.0, grid=None, tol: float = 1e-10):
    """True when the mean curvature points upward at every grid point.

    Returns (ok, first_violation) where the violation is (r, value) or None.
    """
    k = _kval(kappa)
    if grid is None:
        raise ValueError("grid of radii is required")
    for r in grid:
        h = graph_mean_curvature(profile, k, r)
        if h < -tol:
            return False, (float(r), float(h))
    return True, None


def level_set_mean_curvature(r: float, kappa=1.0, n: int = 3) -> float:
    """Mean curvature (n-1)*kappa*coth(kappa r) of the coordinate sphere."""
    if not r > 0.0:
        raise DomainError(f"radius must be positive, got {r}")
    nn = n.n if hasattr(n, "n") else int(n)
    return (nn - 1) * kappa_coth(r, kappa)


def mean_curvature_comparison_check(
    profile: RadialProfile,
    kappa=1.0,
    r: float = 1.0,
    eps_regular: float = EPS_REGULAR,
) -> float:
    """Residual of the graph-vs-level-set mean curvature inequality.

    residual = cos * Hbar * H_level - curly/2 - n/(2(n-1)) * cos^2 * H_level^2

    with cos = V |f'| / sqrt(1 + V^2 f'^2) the tilt of the graph normal
    against the level-set normal, Hbar the unit-normal graph mean curvature
    and H_level signed by the slope direction (the inequality itself is
    orientation-independent).  Non-negative whenever the shifted scalar
    curvature admits the lower bound; the exact family saturates it.
    """
    k = _kval(kappa)
    n = profile.n
    fp = profile.f_prime(r)
    if abs(fp) <= eps_regular:
        raise RegularityError(f"|f'({r})| = {abs(fp):.2e} below {eps_regular}")
    v = math.cosh(k * r)
    w = 1.0 + v * v * fp * fp
    cos_tilt = v * abs(fp) / math.sqrt(w)
    h_level = math.copysign(1.0, fp) * level_set_mean_curvature(r, k, n)
    h_bar = unit_graph_mean_curvature(profile, k, r)
    _, curly = scalar_curvature(profile, k, r)
    return cos_tilt * h_bar * h_level - 0.5 * curly - (
        n / (2.0 * (n - 1))
    ) * cos_tilt**2 * h_level**2

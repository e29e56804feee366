"""Radial graph profiles over hyperbolic space.

A profile is a height function f(r) with analytic derivative access.  The
exact test family solves 1 + rho^2 - 2m rho^(2-n) = 0 for its horizon and
realizes the height by quadrature of a closed-form integrand; its first and
second derivatives are closed-form, never numerical differences of the
quadrature.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import BPoly
from scipy.optimize import brentq

from .core import _kval
from .errors import DomainError, NonConvergenceError

__all__ = [
    "BoundaryKind",
    "RadialProfile",
    "AdSSchwarzschild",
    "ads_horizon_radius",
    "ads_profile",
    "constant_profile",
    "smooth_entire_profile",
    "random_entire_profile",
    "random_monotone_profile",
    "rescale",
    "profile_to_json",
    "profile_from_json",
]


class BoundaryKind(Enum):
    ENTIRE = "entire"
    MINIMAL_BOUNDARY = "minimal_boundary"


@dataclass(frozen=True)
class RadialProfile:
    """A rotationally symmetric graphing function with derivative access.

    ``decay_rate`` is the exponential rate at which the weighted slope
    ``V^2 f'^2`` dies off at infinity; it seeds tail bounds in the improper
    integrals.  ``boundary_value`` caches the constant value on the inner
    boundary for profiles with a horizon.
    """

    f: Callable[[float], float]
    f_prime: Callable[[float], float]
    f_double_prime: Callable[[float], float]
    n: int
    domain_start: float = 0.0
    boundary_kind: BoundaryKind = BoundaryKind.ENTIRE
    decay_rate: float = 1.0
    boundary_value: Optional[float] = None
    label: str = "profile"

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"profile dimension must be >= 3, got {self.n}")
        if self.domain_start < 0.0:
            raise ValueError("domain_start must be >= 0")
        if not self.decay_rate > 0.0:
            raise ValueError("decay_rate must be positive")
        if self.boundary_kind is BoundaryKind.ENTIRE and self.domain_start != 0.0:
            raise ValueError("entire profiles must start at r = 0")

    @property
    def is_entire(self) -> bool:
        return self.boundary_kind is BoundaryKind.ENTIRE

    def inner_value(self) -> float:
        """Value of f at the inner edge of the domain."""
        if self.boundary_value is not None:
            return self.boundary_value
        eps = 1e-9 * max(1.0, self.domain_start)
        return self.f(self.domain_start + eps if not self.is_entire else 0.0)

    def height_limit(self, r_far: float = 40.0) -> float:
        """Limit of f at infinity: far value plus an analytic slope tail.

        V^2 f'^2 decays like exp(-decay_rate * r), so |f'| decays at least
        like exp(-(decay_rate/2 + 1) r); the tail of the slope integral is
        bounded by |f'(R)| over that rate.
        """
        rate = 0.5 * self.decay_rate + 1.0
        return self.f(r_far) + self.f_prime(r_far) / rate

    def validate(self, grid=None) -> list:
        """Probe the structural invariants numerically; return findings.

        Findings are strings, empty when nothing is suspicious.  Enforcement
        is left to callers (the decay conditions are metadata, not verified
        integrals).
        """
        findings = []
        if self.is_entire:
            fp0 = self.f_prime(1e-9)
            if abs(fp0) > 1e-6:
                findings.append(f"entire profile has f'(0) = {fp0:.3e} != 0")
        else:
            slope = abs(self.f_prime(self.domain_start + 1e-12))
            if slope < 1e5:
                findings.append(
                    f"minimal-boundary profile has |f'| = {slope:.3e} near the horizon"
                )
        grid = grid if grid is not None else [5.0, 10.0, 20.0, 30.0]
        prev = None
        for r in grid:
            if r <= self.domain_start:
                continue
            w = (math.cosh(r) * self.f_prime(r)) ** 2
            if prev is not None and w > prev * 1.5 + 1e-30:
                findings.append(f"V^2 f'^2 not decaying near r = {r}")
            prev = w
        return findings


# ---------------------------------------------------------------------------
# Exact family with a horizon
# ---------------------------------------------------------------------------


def ads_horizon_radius(n: int, m: float) -> float:
    """Largest positive root rho0 of 1 + rho^2 - 2m rho^(2-n) = 0.

    rho^(n-2) (1 + rho^2) is strictly increasing, so the positive root is
    unique; it is bracketed and polished to |residual| < 1e-12.
    """
    if not m > 0.0:
        raise ValueError(f"mass must be positive, got {m}")
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")

    def horizon_eq(rho):
        return 1.0 + rho * rho - 2.0 * m * rho ** (2 - n)

    hi = 2.0 * max(1.0, (2.0 * m) ** (1.0 / n), (2.0 * m) ** (1.0 / (n - 2)))
    lo = min(1e-8, 0.5 * (2.0 * m) ** (1.0 / (n - 2)))
    rho0 = brentq(horizon_eq, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    # One Newton step tightens the residual to the spec'd 1e-12.
    d = 2.0 * rho0 + 2.0 * m * (n - 2) * rho0 ** (1 - n)
    rho0 -= horizon_eq(rho0) / d
    if abs(horizon_eq(rho0)) > 1e-12:
        raise NonConvergenceError(
            f"horizon residual {horizon_eq(rho0):.3e} exceeds 1e-12"
        )
    return rho0


@dataclass(frozen=True)
class AdSSchwarzschild:
    """Parameters of the exact rotationally symmetric test family."""

    n: int
    m: float
    rho0: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "rho0", ads_horizon_radius(self.n, self.m))

    @property
    def r0(self) -> float:
        """Horizon radius in the geodesic polar coordinate, rho = sinh r."""
        return math.asinh(self.rho0)

    def metric_coefficient(self, rho: float) -> float:
        """1 + rho^2 - 2m rho^(2-n), positive above the horizon."""
        return 1.0 + rho * rho - 2.0 * self.m * rho ** (2 - self.n)


def _ads_slope_sq_rho(fam: AdSSchwarzschild, rho: float) -> float:
    """(df/dr)^2 expressed through rho: 2m rho^(2-n) / (P(rho) (1+rho^2))."""
    p = fam.metric_coefficient(rho)
    if p <= 0.0:
        raise DomainError(f"rho={rho} is at or inside the horizon rho0={fam.rho0}")
    return 2.0 * fam.m * rho ** (2 - fam.n) / (p * (1.0 + rho * rho))


def _ads_qfactor(fam: AdSSchwarzschild, u: float) -> float:
    """P(rho0 + u^2) / u^2 without the cancellation at the horizon.

    Writes P(s) - P(rho0) as u^2 (s + rho0) - 2m (s^(2-n) - rho0^(2-n)) and
    evaluates the power difference through expm1/log1p; the u -> 0 limit is
    P'(rho0) > 0.
    """
    rho0 = fam.rho0
    s = rho0 + u * u
    x = u * u / rho0
    if x == 0.0:
        d = (2.0 - fam.n) * rho0 ** (1 - fam.n)
    else:
        d = rho0 ** (1 - fam.n) * math.expm1((2.0 - fam.n) * math.log1p(x)) / x
    return (s + rho0) - 2.0 * fam.m * d


def _ads_height(fam: AdSSchwarzschild, rho: float) -> float:
    """Height integral from the horizon to rho in the substitution u = sqrt(rho - rho0).

    The slope has an integrable inverse-square-root blow-up at the horizon;
    the substitution makes the integrand smooth (and finite at u = 0, where
    the stable horizon factor takes over).
    """
    if rho <= fam.rho0:
        return 0.0

    def integrand(u):
        s = fam.rho0 + u * u
        q = _ads_qfactor(fam, u)
        return 2.0 * math.sqrt(2.0 * fam.m * s ** (2 - fam.n) / q) / (1.0 + s * s)

    u_max = math.sqrt(rho - fam.rho0)
    if u_max <= 4.0:
        value, _ = quad(integrand, 0.0, u_max, epsabs=1e-13, epsrel=1e-12, limit=200)
        return value
    head, _ = quad(integrand, 0.0, 4.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    tail, _ = quad(integrand, 4.0, u_max, epsabs=1e-13, epsrel=1e-12, limit=200)
    return head + tail


def ads_profile(n: int, m: float) -> RadialProfile:
    """The exact family of mass m as a radial profile in r (rho = sinh r).

    f(r0) = 0 with a minimal inner boundary at r0 = arcsinh(rho0); the slope
    in r is sqrt(2m rho^(2-n) / (P(rho)(1+rho^2))) with P the horizon
    polynomial, so both derivatives are closed-form.
    """
    fam = AdSSchwarzschild(n=n, m=m)
    r0 = fam.r0
    cache: dict = {}

    def f(r: float) -> float:
        r = float(r)
        if r <= r0:
            return 0.0
        got = cache.get(r)
        if got is None:
            got = cache[r] = _ads_height(fam, math.sinh(r))
        return got

    def f_prime(r: float) -> float:
        rho = math.sinh(float(r))
        s2 = _ads_slope_sq_rho(fam, rho)
        return math.sqrt(s2) if s2 > 0.0 else 0.0

    def f_double_prime(r: float) -> float:
        r = float(r)
        rho = math.sinh(r)
        p = fam.metric_coefficient(rho)
        if p <= 0.0:
            raise DomainError(f"r={r} is at or inside the horizon r0={r0}")
        dp = 2.0 * rho + 2.0 * m * (n - 2) * rho ** (1 - n)
        # d(log f')/d rho from the closed form of f'^2, then chain through rho.
        dlog = 0.5 * ((2 - n) / rho - dp / p - 2.0 * rho / (1.0 + rho * rho))
        return f_prime(r) * dlog * math.cosh(r)

    return RadialProfile(
        f=f,
        f_prime=f_prime,
        f_double_prime=f_double_prime,
        n=n,
        domain_start=r0,
        boundary_kind=BoundaryKind.MINIMAL_BOUNDARY,
        decay_rate=float(n),
        boundary_value=0.0,
        label=f"ads(n={n}, m={m})",
    )


# ---------------------------------------------------------------------------
# Entire profiles
# ---------------------------------------------------------------------------


def constant_profile(n: int, value: float = 0.0) -> RadialProfile:
    """The totally geodesic slice f == value."""
    return RadialProfile(
        f=lambda r: value,
        f_prime=lambda r: 0.0,
        f_double_prime=lambda r: 0.0,
        n=n,
        decay_rate=2.0,
        label=f"const({value})",
    )


def _pole_warp(r: float):
    """g(r) = r + exp(-r) - 1 and its derivatives.

    g(0) = g'(0) = 0 smooths any composed profile at the pole while g ~ r - 1
    at infinity keeps exponential decay rates intact (corrections are
    themselves exponentially small).
    """
    e = math.exp(-r)
    return r + e - 1.0, 1.0 - e, e


def smooth_entire_profile(
    n: int,
    amplitude: float,
    rate: float,
    wobble: float = 0.0,
    wobble_rate: float = 1.0,
    frequency: float = 1.0,
    phase: float = 0.0,
    label: str = "smooth",
) -> RadialProfile:
    """f(r) = amplitude * exp(-rate*g(r)) * (1 + wobble * exp(-wobble_rate*g(r)) * sin(frequency*g(r)+phase)).

    The pole warp g keeps f'(0) = 0.  At the critical rate (n+2)/2 the mass
    limit is finite and nonzero provided wobble_rate > 0; faster rates give
    zero mass.  V^2 f'^2 decays like exp(-2(rate-1) r).
    """
    if rate <= 1.0:
        raise ValueError("rate must exceed 1 for the weighted slope to decay")

    def parts(r: float):
        u, du, ddu = _pole_warp(r)
        env = amplitude * math.exp(-rate * u)
        s = math.sin(frequency * u + phase)
        c = math.cos(frequency * u + phase)
        w = wobble * math.exp(-wobble_rate * u)
        mod = 1.0 + w * s
        mod_u = w * (-wobble_rate * s + frequency * c)
        mod_uu = w * ((wobble_rate**2 - frequency**2) * s - 2.0 * wobble_rate * frequency * c)
        val = env * mod
        val_u = env * (mod_u - rate * mod)
        val_uu = env * (mod_uu - 2.0 * rate * mod_u + rate * rate * mod)
        return val, val_u * du, val_uu * du * du + val_u * ddu

    return RadialProfile(
        f=lambda r: parts(r)[0],
        f_prime=lambda r: parts(r)[1],
        f_double_prime=lambda r: parts(r)[2],
        n=n,
        decay_rate=2.0 * (rate - 1.0),
        label=label,
    )


def random_entire_profile(rng: np.random.Generator, n: int, critical: bool = False) -> RadialProfile:
    """One seeded sample of the smooth entire family.

    ``critical=True`` pins the decay to the rate (n+2)/2 at which the mass
    limit is finite and nonzero; otherwise the rate is strictly faster and
    the mass vanishes.
    """
    amplitude = rng.uniform(0.05, 0.4) * rng.choice([-1.0, 1.0])
    base = (n + 2) / 2.0
    rate = base if critical else base + rng.uniform(0.5, 1.5)
    return smooth_entire_profile(
        n=n,
        amplitude=float(amplitude),
        rate=float(rate),
        wobble=float(rng.uniform(0.0, 0.4)),
        wobble_rate=float(rng.uniform(0.5, 1.5)),
        frequency=float(rng.uniform(0.5, 3.0)),
        phase=float(rng.uniform(0.0, 2.0 * math.pi)),
        label=f"smooth(n={n}, critical={critical})",
    )


def random_monotone_profile(
    rng: np.random.Generator, n: int, critical: bool = True, tries: int = 64
) -> RadialProfile:
    """A seeded increasing entire profile (f' >= 0 on a probe grid).

    Negative amplitude makes the envelope increase toward its limit 0; the
    wobble is rejected (deterministically, by redrawing) until the slope is
    non-negative everywhere on the grid.
    """
    probe = np.linspace(1e-3, 25.0, 400)
    for _ in range(tries):
        amplitude = -rng.uniform(0.05, 0.4)
        base = (n + 2) / 2.0
        rate = base if critical else base + rng.uniform(0.5, 1.5)
        p = smooth_entire_profile(
            n=n,
            amplitude=float(amplitude),
            rate=float(rate),
            wobble=float(rng.uniform(0.0, 0.25)),
            wobble_rate=float(rng.uniform(0.8, 1.5)),
            frequency=float(rng.uniform(0.5, 1.5)),
            phase=float(rng.uniform(0.0, 2.0 * math.pi)),
            label=f"monotone(n={n}, critical={critical})",
        )
        if min(p.f_prime(r) for r in probe) >= 0.0:
            return p
    raise NonConvergenceError("could not draw a monotone profile within the try cap")


# ---------------------------------------------------------------------------
# Rescaling
# ---------------------------------------------------------------------------


def rescale(profile: RadialProfile, h0: float, kappa) -> RadialProfile:
    """The zoomed profile (f(kappa r) - h0) / kappa on the model of scale kappa.

    Derivatives chain analytically: the slope at r equals the original slope
    at kappa*r, the second derivative picks up one factor of kappa.
    """
    k = _kval(kappa)
    return RadialProfile(
        f=lambda r: (profile.f(k * r) - h0) / k,
        f_prime=lambda r: profile.f_prime(k * r),
        f_double_prime=lambda r: k * profile.f_double_prime(k * r),
        n=profile.n,
        domain_start=profile.domain_start / k,
        boundary_kind=profile.boundary_kind,
        decay_rate=profile.decay_rate * k,
        boundary_value=(
            None if profile.boundary_value is None else (profile.boundary_value - h0) / k
        ),
        label=f"rescale({profile.label}, h0={h0}, kappa={k})",
    )


# ---------------------------------------------------------------------------
# Serialization of sampled profiles
# ---------------------------------------------------------------------------


def profile_to_json(profile: RadialProfile, r_grid) -> str:
    """Serialize a profile as value/derivative samples on a grid."""
    samples = [
        {
            "r": float(r),
            "f": float(profile.f(r)),
            "f1": float(profile.f_prime(r)),
            "f2": float(profile.f_double_prime(r)),
        }
        for r in r_grid
    ]
    doc = {
        "kind": profile.boundary_kind.value,
        "n": profile.n,
        "decay_rate": profile.decay_rate,
        "domain_start": profile.domain_start,
        "boundary_value": profile.boundary_value,
        "samples": samples,
    }
    return json.dumps(doc, indent=2)


def profile_from_json(text: str) -> RadialProfile:
    """Rebuild a sampled profile with smooth interpolation.

    Piecewise quintic Hermite interpolation matches the stored values and
    both stored derivatives at every node, so the rebuilt profile is twice
    continuously differentiable; monotone data stays monotone to sampling
    accuracy.
    """
    doc = json.loads(text)
    samples = sorted(doc["samples"], key=lambda s: s["r"])
    if len(samples) < 2:
        raise ValueError("need at least two samples")
    xs = np.array([s["r"] for s in samples])
    yd = np.array([[s["f"], s["f1"], s["f2"]] for s in samples])
    poly = BPoly.from_derivatives(xs, yd)
    d1 = poly.derivative()
    d2 = d1.derivative()
    lo, hi = xs[0], xs[-1]

    def clamp(r):
        if r < lo or r > hi:
            raise DomainError(f"r={r} outside sampled range [{lo}, {hi}]")
        return r

    return RadialProfile(
        f=lambda r: float(poly(clamp(r))),
        f_prime=lambda r: float(d1(clamp(r))),
        f_double_prime=lambda r: float(d2(clamp(r))),
        n=int(doc["n"]),
        domain_start=float(doc["domain_start"]),
        boundary_kind=BoundaryKind(doc["kind"]),
        decay_rate=float(doc["decay_rate"]),
        boundary_value=doc.get("boundary_value"),
        label="sampled",
    )

"""Model geometry of hyperbolic space in geodesic polar coordinates.

The model of curvature -kappa^2 is the plane ``R^n`` with metric
``dr^2 + (sinh(kappa r)/kappa)^2 sigma`` and lapse ``cosh(kappa r)``.
Everything in this module is a pure function of immutable inputs: radial
calculus for functions of ``r`` alone, sphere areas, and an improper-integral
routine for the exponentially decaying integrands that show up in the mass
limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .errors import DomainError, NonConvergenceError

__all__ = [
    "Dimension",
    "ScaleKappa",
    "LapseBasis",
    "RadialCalculus",
    "lapse",
    "kappa_coth",
    "sphere_area",
    "unit_sphere_volume",
    "mass_constant",
    "radial_calculus",
    "quad_improper",
]

# Default tolerances; every routine that uses them takes overrides.
ABS_TOL = 1e-10
REL_TOL = 1e-8


@dataclass(frozen=True)
class Dimension:
    """Dimension of the base hyperbolic space (the graph lives one higher)."""

    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"dimension must be >= 3, got {self.n}")

    @property
    def omega(self) -> float:
        """Volume of the unit round sphere S^(n-1)."""
        return unit_sphere_volume(self.n)

    @property
    def mass_constant(self) -> float:
        """Normalization 2(n-1) * omega_{n-1} dividing the mass integrals."""
        return 2.0 * (self.n - 1) * self.omega


@dataclass(frozen=True)
class ScaleKappa:
    """Inverse radius of the model; kappa = 1 is the unit hyperbolic space."""

    kappa: float

    def __post_init__(self):
        if not self.kappa > 0.0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")


def _kval(kappa) -> float:
    """Accept a ScaleKappa or a bare positive float."""
    k = kappa.kappa if isinstance(kappa, ScaleKappa) else float(kappa)
    if not k > 0.0:
        raise ValueError(f"kappa must be positive, got {k}")
    return k


@dataclass(frozen=True)
class LapseBasis:
    """One element of the standard lapse basis on the unit model.

    Index 0 is the radial lapse cosh(r); index i in 1..n is the coordinate
    lapse x^i sinh(r).  The stored signature is the sign of the Lorentzian
    product on the span of the basis; nothing else of that product is used
    numerically.
    """

    index: int
    n: int

    def __post_init__(self):
        if not 0 <= self.index <= self.n:
            raise ValueError(f"basis index must lie in 0..{self.n}, got {self.index}")

    @property
    def signature(self) -> int:
        return 1 if self.index == 0 else -1

    @property
    def has_angular_factor(self) -> bool:
        """True for the x^i sinh(r) elements whose sphere average vanishes."""
        return self.index >= 1

    def radial_part(self, r: float) -> float:
        return math.cosh(r) if self.index == 0 else math.sinh(r)


def lapse(r: float, kappa=1.0) -> float:
    """Lapse cosh(kappa r); weights the vertical direction of the ambient metric."""
    if r < 0.0:
        raise DomainError(f"radius must be non-negative, got {r}")
    return math.cosh(_kval(kappa) * r)


def kappa_coth(r: float, kappa=1.0) -> float:
    """kappa * coth(kappa r), stable near r = 0.

    For kappa*r < 1e-4 the series 1/r + kappa^2 r / 3 avoids the
    cancellation in cosh/sinh.
    """
    k = _kval(kappa)
    x = k * r
    if x <= 0.0:
        raise DomainError(f"kappa*r must be positive, got {x}")
    if x < 1e-4:
        return 1.0 / r + k * k * r / 3.0
    return k / math.tanh(x)


def unit_sphere_volume(n: int) -> float:
    """Volume of the unit round sphere S^(n-1) in R^n: 2 pi^(n/2) / Gamma(n/2)."""
    n = n.n if isinstance(n, Dimension) else int(n)
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def mass_constant(n: int) -> float:
    """2(n-1) * omega_{n-1}."""
    n = n.n if isinstance(n, Dimension) else int(n)
    return 2.0 * (n - 1) * unit_sphere_volume(n)


def sphere_radius_factor(r: float, kappa=1.0) -> float:
    """Warping factor sinh(kappa r)/kappa of the coordinate sphere at radius r."""
    k = _kval(kappa)
    return math.sinh(k * r) / k


def sphere_area(r: float, kappa=1.0, n=3) -> float:
    """Area of the coordinate sphere of radius r: omega_{n-1} (sinh(kappa r)/kappa)^(n-1)."""
    if not r > 0.0:
        raise DomainError(f"radius must be positive, got {r}")
    nn = n.n if isinstance(n, Dimension) else int(n)
    return unit_sphere_volume(nn) * sphere_radius_factor(r, kappa) ** (nn - 1)


@dataclass(frozen=True)
class RadialCalculus:
    """First and second derivatives of a radial function, metric-contracted.

    ``laplacian`` is assembled as ``hess_rr + (n-1) * hess_tan`` so the
    decomposition identity holds at the bit level by construction.
    """

    grad_norm: float
    laplacian: float
    hess_rr: float
    hess_tan: float


def radial_calculus(profile, r: float, kappa=1.0) -> RadialCalculus:
    """Gradient norm, Laplacian and Hessian components of a radial profile.

    The profile supplies f', f'' and its dimension; the tangential Hessian
    eigenvalue is kappa*coth(kappa r)*f'.
    """
    k = _kval(kappa)
    if not r > profile.domain_start or not math.isfinite(r):
        raise DomainError(
            f"r={r} is outside the open domain ({profile.domain_start}, inf)"
        )
    fp = profile.f_prime(r)
    fpp = profile.f_double_prime(r)
    hess_tan = kappa_coth(r, k) * fp
    return RadialCalculus(
        grad_norm=abs(fp),
        laplacian=fpp + (profile.n - 1) * hess_tan,
        hess_rr=fpp,
        hess_tan=hess_tan,
    )


def quad_improper(
    g,
    a: float,
    decay_hint: float,
    abs_tol: float = ABS_TOL,
    rel_tol: float = REL_TOL,
    span: float = 5.0,
    growth: float = 2.0,
    max_windows: int = 24,
) -> float:
    """Integrate g over [a, inf) assuming eventual exponential decay.

    Adaptive panels cover [a, R]; R grows geometrically until the analytic
    tail bound |g(R)| / decay_hint (sampled at a few trailing points for
    safety against local zeros) drops below tolerance.  Deterministic for
    fixed inputs.

    Raises NonConvergenceError if the window cap is hit or a panel
    evaluates non-finite.
    """
    if not decay_hint > 0.0:
        raise ValueError(f"decay_hint must be positive, got {decay_hint}")
    total = 0.0
    lo = a
    width = span
    for _ in range(max_windows):
        hi = lo + width
        value, _err = quad(g, lo, hi, epsabs=abs_tol / 4.0, epsrel=rel_tol / 4.0, limit=200)
        if not math.isfinite(value):
            raise NonConvergenceError(
                f"integrand non-finite on [{lo}, {hi}]; integral likely divergent"
            )
        total += value
        probe = max(abs(g(hi)), abs(g(hi - 0.25 * width)), abs(g(hi - 0.5 * width)))
        tail_bound = 2.0 * probe / decay_hint
        if tail_bound <= max(abs_tol, rel_tol * abs(total)):
            return total
        lo = hi
        width *= growth
    raise NonConvergenceError(
        f"tail bound not met after {max_windows} windows (last R={lo})"
    )

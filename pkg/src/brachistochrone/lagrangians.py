"""Autonomous Lagrangians ``L(x, y)`` and Hessian-based convexity checks.

Throughout, ``x`` stands for the curve value and ``y`` for its slope, so a
curve ``gamma`` is integrated as ``L(gamma(t), gamma'(t))``.  All callables
broadcast over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ArgumentError, DomainError

__all__ = [
    "Rectangle",
    "Lagrangian",
    "Hessian2",
    "ConvexityReport",
    "brachistochrone_lagrangian",
    "transformed_lagrangian",
    "affine_lagrangian",
    "constant_lagrangian",
    "lagrangian_by_name",
    "hessian",
    "convexity_report",
]

_FD_STEP = np.finfo(float).eps ** (1.0 / 3.0)
PD_TOL = 1e-12


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle ``[x_min, x_max] x [y_min, y_max]``.

    Used both as the open domain of a Lagrangian (bounds excluded, possibly
    infinite) and as a closed sampling region.
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ArgumentError(f"degenerate rectangle {self}")

    def contains_open(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return (x > self.x_min) & (x < self.x_max) & (y > self.y_min) & (y < self.y_max)

    def is_inside(self, other: "Rectangle") -> bool:
        """True if this closed rectangle lies in the open rectangle ``other``."""
        return (
            self.x_min > other.x_min
            and self.x_max < other.x_max
            and self.y_min > other.y_min
            and self.y_max < other.y_max
        )


HALF_PLANE = Rectangle(0.0, math.inf, -math.inf, math.inf)


@dataclass(frozen=True)
class Lagrangian:
    """An integrand with analytic first partials and optional second partials.

    Missing second partials are replaced by central differences of the first
    partials when a Hessian is requested.
    """

    name: str
    f: Callable
    fx: Callable
    fy: Callable
    domain: Rectangle = HALF_PLANE
    fxx: Optional[Callable] = None
    fxy: Optional[Callable] = None
    fyy: Optional[Callable] = None

    def check_domain(self, x, y):
        inside = self.domain.contains_open(x, y)
        if not np.all(inside):
            xs = np.broadcast_to(np.asarray(x, float), inside.shape)
            ys = np.broadcast_to(np.asarray(y, float), inside.shape)
            bad = np.flatnonzero(~inside.ravel())[0] if inside.ndim else 0
            raise DomainError(
                f"{self.name}: point ({xs.ravel()[bad]!r}, {ys.ravel()[bad]!r}) "
                f"outside domain {self.domain}"
            )

    def __call__(self, x, y):
        self.check_domain(x, y)
        return self.f(x, y)

    def dx(self, x, y):
        self.check_domain(x, y)
        return self.fx(x, y)

    def dy(self, x, y):
        self.check_domain(x, y)
        return self.fy(x, y)

    @property
    def has_second_partials(self) -> bool:
        return self.fxx is not None and self.fxy is not None and self.fyy is not None


def _brach_f(x, y):
    return np.sqrt((1.0 + y * y) / x)


def _brach_fx(x, y):
    return -0.5 * np.sqrt((1.0 + y * y) / x**3)


def _brach_fy(x, y):
    return y / np.sqrt(x * (1.0 + y * y))


def _brach_fxx(x, y):
    return 0.75 * np.sqrt(1.0 + y * y) * x**-2.5


def _brach_fxy(x, y):
    return -0.5 * y / (np.sqrt(1.0 + y * y) * x**1.5)


def _brach_fyy(x, y):
    return 1.0 / (np.sqrt(x) * (1.0 + y * y) ** 1.5)


def brachistochrone_lagrangian() -> Lagrangian:
    """``L(x, y) = sqrt((1 + y^2) / x)`` on ``(0, inf) x R``."""
    return Lagrangian(
        "brach",
        _brach_f,
        _brach_fx,
        _brach_fy,
        HALF_PLANE,
        _brach_fxx,
        _brach_fxy,
        _brach_fyy,
    )


# M(x, y) = sqrt(x^-2 + y^2); S below is x^-2 + y^2.
def _m_f(x, y):
    return np.sqrt(x**-2.0 + y * y)


def _m_fx(x, y):
    return -(x**-3.0) / np.sqrt(x**-2.0 + y * y)


def _m_fy(x, y):
    return y / np.sqrt(x**-2.0 + y * y)


def _m_fxx(x, y):
    s = x**-2.0 + y * y
    return x**-4.0 * (2.0 * x**-2.0 + 3.0 * y * y) * s**-1.5


def _m_fxy(x, y):
    s = x**-2.0 + y * y
    return y * x**-3.0 * s**-1.5


def _m_fyy(x, y):
    s = x**-2.0 + y * y
    return x**-2.0 * s**-1.5


def transformed_lagrangian() -> Lagrangian:
    """``M(x, y) = sqrt(x^-2 + y^2)``, the integrand after ``delta = sqrt(2 gamma)``.

    ``M`` is strictly convex on its domain and ``|dM/dy| <= 1``.
    """
    return Lagrangian(
        "transformed",
        _m_f,
        _m_fx,
        _m_fy,
        HALF_PLANE,
        _m_fxx,
        _m_fxy,
        _m_fyy,
    )


def affine_lagrangian(cx=1.0, cy=1.0, c0=0.0, domain=HALF_PLANE) -> Lagrangian:
    """``L(x, y) = cx*x + cy*y + c0``; its Hessian vanishes identically."""

    def zero(x, y):
        return np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)

    return Lagrangian(
        "affine",
        lambda x, y: cx * np.asarray(x, float) + cy * np.asarray(y, float) + c0,
        lambda x, y: cx + zero(x, y),
        lambda x, y: cy + zero(x, y),
        domain,
        zero,
        zero,
        zero,
    )


def constant_lagrangian(value=1.0, domain=HALF_PLANE) -> Lagrangian:
    lag = affine_lagrangian(0.0, 0.0, value, domain)
    return Lagrangian("constant", lag.f, lag.fx, lag.fy, domain, lag.fxx, lag.fxy, lag.fyy)


_BY_NAME = {
    "brach": brachistochrone_lagrangian,
    "transformed": transformed_lagrangian,
    "constant": constant_lagrangian,
}


def lagrangian_by_name(name: str) -> Lagrangian:
    try:
        return _BY_NAME[name]()
    except KeyError:
        raise ArgumentError(
            f"unknown Lagrangian {name!r}; choose from {sorted(_BY_NAME)}"
        ) from None


@dataclass(frozen=True)
class Hessian2:
    """Symmetric 2x2 matrix ``[[dxx, dxy], [dxy, dyy]]``.

    Fields may be arrays of equal shape; every method then works elementwise.
    """

    dxx: object
    dxy: object
    dyy: object

    def matrix(self) -> np.ndarray:
        return np.array([[self.dxx, self.dxy], [self.dxy, self.dyy]], dtype=float)

    def norm(self):
        return np.sqrt(self.dxx**2 + 2.0 * self.dxy**2 + self.dyy**2)

    def determinant(self):
        return self.dxx * self.dyy - self.dxy**2

    def eigenvalues(self):
        """Return ``(lambda_min, lambda_max)`` without cancellation.

        The eigenvalue of larger magnitude comes from the quadratic formula,
        the other one from ``det / lambda``.
        """
        a, b, c = (np.asarray(v, dtype=float) for v in (self.dxx, self.dxy, self.dyy))
        half_tr = 0.5 * (a + c)
        disc = np.hypot(0.5 * (a - c), b)
        det = a * c - b * b
        big = np.where(half_tr >= 0.0, half_tr + disc, half_tr - disc)
        with np.errstate(divide="ignore", invalid="ignore"):
            small = np.where(big != 0.0, det / big, 0.0)
        lo = np.where(half_tr >= 0.0, small, big)
        hi = np.where(half_tr >= 0.0, big, small)
        if lo.ndim == 0:
            return float(lo), float(hi)
        return lo, hi

    def min_eigenvalue(self):
        return self.eigenvalues()[0]

    def is_positive_definite(self, tol=PD_TOL):
        """Leading principal minors test, tolerance relative to the Frobenius norm."""
        scale = self.norm()
        return (self.dxx > tol * scale) & (self.determinant() > tol * scale**2)


def _fd_step(v, lower):
    h = _FD_STEP * np.maximum(1.0, np.abs(v))
    # keep the stencil inside the domain near a finite lower edge
    if np.isfinite(lower):
        h = np.minimum(h, 0.5 * (np.asarray(v) - lower))
    return h


def hessian(lag: Lagrangian, x, y) -> Hessian2:
    """Second partials of ``lag`` at ``(x, y)``.

    Analytic when the Lagrangian provides them, otherwise central differences
    of the analytic first partials; the mixed partial is then symmetrised.
    """
    lag.check_domain(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if lag.has_second_partials:
        out = Hessian2(lag.fxx(x, y), lag.fxy(x, y), lag.fyy(x, y))
    else:
        hx = _fd_step(x, lag.domain.x_min)
        hy = _fd_step(y, lag.domain.y_min)
        dxx = (lag.fx(x + hx, y) - lag.fx(x - hx, y)) / (2 * hx)
        dyy = (lag.fy(x, y + hy) - lag.fy(x, y - hy)) / (2 * hy)
        dxy = (lag.fy(x + hx, y) - lag.fy(x - hx, y)) / (2 * hx)
        dyx = (lag.fx(x, y + hy) - lag.fx(x, y - hy)) / (2 * hy)
        out = Hessian2(dxx, 0.5 * (dxy + dyx), dyy)
    if x.ndim == 0 and y.ndim == 0:
        return Hessian2(float(out.dxx), float(out.dxy), float(out.dyy))
    return out


@dataclass(frozen=True)
class ConvexityReport:
    """Outcome of sampling the Hessian over a rectangle.

    ``verdict`` is one of

    * ``"positive-definite"``: every sample passed the minors test;
    * ``"witness-found"``: some sample has a negative eigenvalue, stored in
      ``witness`` together with ``witness_min_eigenvalue``;
    * ``"semidefinite"``: no negative eigenvalue but not strictly positive
      everywhere (e.g. an affine integrand).
    """

    lagrangian: str
    region: Rectangle
    n_samples: int
    seed: int
    verdict: str
    min_relative_eigenvalue: float
    witness: Optional[tuple] = None
    witness_min_eigenvalue: Optional[float] = None

    def revalidate(self, lag: Lagrangian) -> Optional[float]:
        """Recompute the smallest eigenvalue at the stored witness."""
        if self.witness is None:
            return None
        return hessian(lag, *self.witness).min_eigenvalue()


def convexity_report(
    lag: Lagrangian, region: Rectangle, n_samples: int = 1000, seed: int = 0, tol=PD_TOL
) -> ConvexityReport:
    """Sample ``n_samples`` uniform points of ``region`` and classify the Hessian.

    The reported witness is the sample whose smallest eigenvalue, relative to
    the Hessian norm, is most negative.
    """
    if n_samples < 1:
        raise ArgumentError("n_samples must be >= 1")
    if not region.is_inside(lag.domain):
        raise DomainError(f"region {region} is not inside the domain {lag.domain}")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(region.x_min, region.x_max, n_samples)
    ys = rng.uniform(region.y_min, region.y_max, n_samples)
    h = hessian(lag, xs, ys)
    lo, _ = h.eigenvalues()
    scale = np.asarray(h.norm(), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(scale > 0.0, lo / scale, 0.0)
    worst = int(np.argmin(rel))
    neg = rel[worst] < -tol
    if neg:
        verdict = "witness-found"
    elif np.all(h.is_positive_definite(tol)):
        verdict = "positive-definite"
    else:
        verdict = "semidefinite"
    return ConvexityReport(
        lagrangian=lag.name,
        region=region,
        n_samples=n_samples,
        seed=seed,
        verdict=verdict,
        min_relative_eigenvalue=float(rel[worst]),
        witness=(float(xs[worst]), float(ys[worst])) if neg else None,
        witness_min_eigenvalue=float(lo[worst]) if neg else None,
    )

"""Closed-form solution of the brachistochrone problem.

The minimiser from ``(0, 0)`` to ``(b, beta)`` (depth measured downwards) is
the cycloid arc

    t(theta) = k/2 (theta - sin theta),   gamma(theta) = k/2 (1 - cos theta),

for ``theta`` in ``[0, theta_tilde]``, where ``theta_tilde`` solves
``alpha(theta) = beta / b`` with

    alpha(theta) = (1 - cos theta) / (theta - sin theta),

a strictly decreasing map of ``(0, 2 pi)`` onto ``(0, inf)``.  Along the arc
``gamma (1 + gamma'^2) = k`` and the travel time is ``sqrt(k) theta_tilde``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .curves import BOUNDARY_TOL, Mesh, SampledCurve
from .errors import ArgumentError, InvariantViolation

__all__ = [
    "BrachProblem",
    "BrachSolution",
    "Shape",
    "CycloidPoint",
    "alpha",
    "alpha_prime",
    "invert_alpha",
    "solve",
    "exact_travel_time",
    "cycloid_point",
    "theta_from_t",
    "slope_angle",
    "sample_solution",
    "same_cycloid_partner",
]

TWO_PI = 2.0 * math.pi
PI_TOL = 1e-9
K_AGREEMENT = 1e-9
_SERIES_CUTOFF = 1e-4
_EPS = np.finfo(float).eps

# theta - sin(theta) = sum_k (-1)^k theta^(2k+3) / (2k+3)!
_TMS_COEFFS = [(-1) ** k / math.factorial(2 * k + 3) for k in range(8)]
# theta sin(theta) - 2 + 2 cos(theta) = sum_k c_k theta^(2k), k >= 2
_NUM_COEFFS = [
    (-1) ** (k + 1) * (1 / math.factorial(2 * k - 1) - 2 / math.factorial(2 * k))
    for k in range(2, 10)
]


def _theta_minus_sin(theta):
    """``theta - sin(theta)`` without cancellation for small ``theta``."""
    theta = np.asarray(theta, dtype=float)
    th2 = theta * theta
    series = np.zeros_like(theta)
    for c in reversed(_TMS_COEFFS):
        series = series * th2 + c
    series *= theta * th2
    return np.where(np.abs(theta) < 0.5, series, theta - np.sin(theta))


def _one_minus_cos(theta):
    return 2.0 * np.sin(0.5 * np.asarray(theta, dtype=float)) ** 2


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def _check_theta(theta):
    th = np.asarray(theta, dtype=float)
    if not np.all((th > 0.0) & (th < TWO_PI)):
        raise ArgumentError("theta must lie in the open interval (0, 2 pi)")
    return th


def alpha(theta):
    """``(1 - cos theta) / (theta - sin theta)`` on ``(0, 2 pi)``.

    Below ``1e-4`` the quotient of the fifth-order Taylor expansions is used.
    """
    th = _check_theta(theta)
    small = th < _SERIES_CUTOFF
    ts = np.where(small, th, 1.0)
    num = ts**2 / 2 - ts**4 / 24 + ts**6 / 720
    den = ts**3 / 6 - ts**5 / 120 + ts**7 / 5040
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = _one_minus_cos(th) / _theta_minus_sin(th)
    return _scalar(np.where(small, num / den, direct))


def alpha_prime(theta):
    """``(theta sin theta - 2 + 2 cos theta) / (theta - sin theta)^2``; negative on ``(0, 2 pi)``."""
    th = _check_theta(theta)
    th2 = th * th
    series = np.zeros_like(th)
    for c in reversed(_NUM_COEFFS):
        series = series * th2 + c
    series *= th2 * th2
    direct = th * np.sin(th) - 2.0 * _one_minus_cos(th)
    num = np.where(th < 0.1, series, direct)
    return _scalar(num / _theta_minus_sin(th) ** 2)


def invert_alpha(ratio: float, tol: float = 1e-12) -> float:
    """The unique ``theta`` in ``(0, 2 pi)`` with ``alpha(theta) = ratio``.

    Bisection down to a bracket of width ``tol``, then Newton steps that are
    kept only while they stay inside the bracket.
    """
    if not ratio > 0:
        raise ArgumentError(f"ratio must be positive, got {ratio!r}")
    if not tol > 0:
        raise ArgumentError("tol must be positive")
    lo, hi = 0.0, TWO_PI
    for _ in range(400):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if alpha(mid) > ratio:
            lo = mid
        else:
            hi = mid
    theta = 0.5 * (lo + hi)
    for _ in range(8):
        if not 0.0 < theta < TWO_PI:
            break
        step = (alpha(theta) - ratio) / alpha_prime(theta)
        nxt = theta - step
        if not lo <= nxt <= hi or nxt == theta:
            break
        theta = nxt
    return float(theta)


class Shape(str, enum.Enum):
    """Monotonicity of the minimiser, decided by ``theta_tilde`` against ``pi``."""

    STRICTLY_INCREASING = "StrictlyIncreasing"
    MAX_AT_ENDPOINT = "MaxAtEndpoint"
    RISES_THEN_FALLS = "RisesThenFalls"

    @classmethod
    def classify(cls, theta_tilde: float, tol: float = PI_TOL) -> "Shape":
        if abs(theta_tilde - math.pi) <= tol:
            return cls.MAX_AT_ENDPOINT
        return cls.STRICTLY_INCREASING if theta_tilde < math.pi else cls.RISES_THEN_FALLS


@dataclass(frozen=True)
class BrachProblem:
    """End point ``(b, beta)``: horizontal extent and depth, both positive."""

    b: float
    beta: float

    def __post_init__(self):
        if not (self.b > 0 and self.beta > 0 and math.isfinite(self.b) and math.isfinite(self.beta)):
            raise ArgumentError(
                f"b and beta must be positive and finite, got b={self.b!r}, beta={self.beta!r}"
            )

    @property
    def ratio(self) -> float:
        return self.beta / self.b


@dataclass(frozen=True)
class BrachSolution:
    b: float
    beta: float
    theta_tilde: float
    k: float
    shape: Shape

    @property
    def beltrami_c(self) -> float:
        return 1.0 / math.sqrt(self.k)

    @property
    def time(self) -> float:
        return exact_travel_time(self)

    @property
    def problem(self) -> BrachProblem:
        return BrachProblem(self.b, self.beta)

    def to_record(self) -> dict:
        return {
            "b": self.b,
            "beta": self.beta,
            "theta_tilde": self.theta_tilde,
            "k": self.k,
            "beltrami_c": self.beltrami_c,
            "class": self.shape.value,
            "time": self.time,
        }


def solve(p: BrachProblem) -> BrachSolution:
    """Determine ``theta_tilde``, ``k`` and the monotonicity class.

    ``k`` is computed from both end conditions ``b = k/2 (th - sin th)`` and
    ``beta = k/2 (1 - cos th)``; a disagreement beyond ``1e-9`` relative means
    the inversion failed.
    """
    theta = invert_alpha(p.ratio)
    k_from_b = 2.0 * p.b / float(_theta_minus_sin(theta))
    k_from_beta = 2.0 * p.beta / float(_one_minus_cos(theta))
    if abs(k_from_b - k_from_beta) > K_AGREEMENT * abs(k_from_b):
        raise InvariantViolation(
            f"k from b ({k_from_b!r}) and from beta ({k_from_beta!r}) disagree "
            f"at theta_tilde={theta!r}"
        )
    return BrachSolution(p.b, p.beta, theta, k_from_b, Shape.classify(theta))


def exact_travel_time(s: BrachSolution) -> float:
    """``sqrt(k) theta_tilde``: along the arc ``L dt = sqrt(k) dtheta``."""
    return math.sqrt(s.k) * s.theta_tilde


@dataclass(frozen=True)
class CycloidPoint:
    theta: float
    t: float
    gamma: float
    slope: float


def _cycloid(k, theta):
    theta = np.asarray(theta, dtype=float)
    t = 0.5 * k * _theta_minus_sin(theta)
    gamma = k * np.sin(0.5 * theta) ** 2
    with np.errstate(divide="ignore"):
        slope = np.cos(0.5 * theta) / np.sin(0.5 * theta)
    slope = np.where(theta == math.pi, 0.0, slope)
    return t, gamma, slope


def cycloid_point(k: float, theta: float) -> CycloidPoint:
    """Point of the cycloid with scale ``k`` at parameter ``theta`` in ``[0, 2 pi)``.

    The slope is ``cot(theta/2)``: infinite at the cusp, zero at ``theta = pi``.
    """
    if not k > 0:
        raise ArgumentError("k must be positive")
    if not 0.0 <= theta < TWO_PI:
        raise ArgumentError("theta must lie in [0, 2 pi)")
    t, g, s = _cycloid(k, theta)
    return CycloidPoint(float(theta), float(t), float(g), float(s))


def theta_from_t(k: float, t, tol: float = 1e-14):
    """Invert ``t = k/2 (theta - sin theta)`` for ``t`` in ``[0, k pi]``.

    Safeguarded Newton started from the small-angle inversion
    ``theta ~ (12 t / k)^(1/3)``; steps leaving the bracket are replaced by
    bisection.  Accepts arrays.
    """
    if not k > 0:
        raise ArgumentError("k must be positive")
    t = np.asarray(t, dtype=float)
    t_max = k * math.pi
    if np.any(t < 0.0) or np.any(t > t_max * (1 + 4 * _EPS)):
        raise ArgumentError(f"t must lie in [0, k pi] = [0, {t_max!r}]")
    t = np.minimum(t, t_max)
    lo = np.zeros_like(t)
    hi = np.full_like(t, TWO_PI)
    theta = np.clip(np.cbrt(12.0 * t / k), 0.0, TWO_PI)
    active = t > 0.0
    theta = np.where(active, theta, 0.0)
    for _ in range(200):
        if not np.any(active):
            break
        f = 0.5 * k * _theta_minus_sin(theta) - t
        lo = np.where(active & (f < 0), theta, lo)
        hi = np.where(active & (f > 0), theta, hi)
        df = k * np.sin(0.5 * theta) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = theta - f / df
        bad = ~((nxt > lo) & (nxt < hi)) | ~np.isfinite(nxt)
        nxt = np.where(bad, 0.5 * (lo + hi), nxt)
        step = np.abs(nxt - theta)
        theta = np.where(active, nxt, theta)
        active = active & (f != 0.0) & (step > 2.0 * _EPS * theta)
    resid = np.abs(0.5 * k * _theta_minus_sin(theta) - t)
    if np.any(resid > tol * k):
        raise InvariantViolation(f"theta_from_t residual {resid.max()!r} exceeds {tol * k!r}")
    return _scalar(theta)


def slope_angle(slope):
    """The angle ``theta`` in ``(0, 2 pi)`` with ``cot(theta/2) = slope``.

    ``2 atan(1/s)`` for ``s > 0``, ``pi`` for ``s = 0`` and
    ``2 (pi + atan(1/s))`` for ``s < 0``.
    """
    s = np.asarray(slope, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        inv = np.arctan(1.0 / s)
    out = np.where(s > 0, 2.0 * inv, np.where(s < 0, 2.0 * (math.pi + inv), math.pi))
    return _scalar(out)


def sample_solution(s: BrachSolution, mesh: Mesh) -> SampledCurve:
    """The minimiser sampled on ``mesh`` with analytic values and slopes."""
    end = 0.5 * s.k * float(_theta_minus_sin(s.theta_tilde))
    if abs(mesh.b - end) > BOUNDARY_TOL * max(1.0, end):
        raise ArgumentError(f"mesh ends at {mesh.b!r}, the arc ends at {end!r}")
    k = s.k
    theta = np.asarray(theta_from_t(k, mesh.nodes), dtype=float)
    theta[-1] = s.theta_tilde
    _, values, slopes = _cycloid(k, theta)
    slopes = np.array(slopes)
    slopes[0] = np.nan

    def evaluator(t, where=None):
        _, g, dg = _cycloid(k, theta_from_t(k, t))
        return g, dg

    return SampledCurve(mesh, values, slopes, s.beta, "cycloid", evaluator)


def same_cycloid_partner(p: BrachProblem) -> Optional[BrachProblem]:
    """The problem with the same depth whose minimiser lies on the same cycloid.

    Its terminal angle is ``2 pi - theta_tilde``.  Returns ``None`` when
    ``theta_tilde = pi``, where the problem is its own partner.
    """
    theta = solve(p).theta_tilde
    if abs(theta - math.pi) <= PI_TOL:
        return None
    other = TWO_PI - theta
    b = p.beta * float(_theta_minus_sin(other)) / float(_one_minus_cos(other))
    return BrachProblem(b, p.beta)

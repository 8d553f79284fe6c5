"""Quadrature for integrands on ``(0, b]`` that may blow up at ``t = 0``.

Strategy for the improper integral ``int_0^b F(t) dt``:

1. substitute ``t = u^s`` so that ``dt = s u^(s-1) du`` damps the singularity;
2. the images of the breakpoints (mesh nodes) split ``[0, b^(1/s)]`` into
   panels; every panel but the first is regular and gets composite Simpson;
3. the first panel ``[0, u_1]`` is split geometrically into pieces
   ``[u_1 2^-(j+1), u_1 2^-j]``.  For a power-law integrand the piece integrals
   form a geometric series, which gives the remaining tail in closed form;
4. each refinement level halves every Simpson subinterval and the results
   are Richardson-extrapolated until two levels agree to ``abs_tol``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ArgumentError, QuadratureError

__all__ = ["QuadratureConfig", "Integral", "integrate_singular", "integrate_regular"]


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-8
    max_levels: int = 14
    substitution: float = 2.0
    geometric_pieces: int = 40

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ArgumentError("abs_tol must be positive")
        if self.max_levels < 3:
            raise ArgumentError("max_levels must be >= 3")
        if not self.substitution >= 1:
            raise ArgumentError("substitution exponent must be >= 1")
        if self.geometric_pieces < 3:
            raise ArgumentError("geometric_pieces must be >= 3")


@dataclass(frozen=True)
class Integral:
    """Value of an integral with its convergence diagnostics."""

    value: float
    converged: bool
    levels: int
    estimates: tuple

    @property
    def error_estimate(self) -> float:
        if len(self.estimates) < 2:
            return float("inf")
        return abs(self.estimates[-1] - self.estimates[-2])

    def __float__(self):
        return float(self.value)


def _simpson_points(a, b, m):
    """Nodes and weights of composite Simpson with ``m`` (even) subintervals.

    ``a`` and ``b`` are arrays of piece endpoints; the result has shape
    ``(len(a), m + 1)``.
    """
    x = np.linspace(0.0, 1.0, m + 1)
    w = np.ones(m + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w /= 3.0 * m
    pts = a[:, None] + (b - a)[:, None] * x[None, :]
    return pts, w[None, :] * (b - a)[:, None]


def integrate_singular(
    integrand: Callable, breakpoints, cfg: QuadratureConfig = QuadratureConfig(), strict=True
) -> Integral:
    """Integrate ``integrand(t, where)`` over ``[breakpoints[0], breakpoints[-1]]``.

    ``breakpoints`` must start at 0; ``integrand`` is never evaluated at 0.
    ``where`` holds, for every evaluation point, the midpoint of the
    breakpoint cell it belongs to.

    With ``strict`` a :class:`QuadratureError` is raised when the levels do
    not settle; otherwise the last estimate is returned with
    ``converged=False``.
    """
    bp = np.asarray(breakpoints, dtype=float)
    if bp[0] != 0.0 or np.any(np.diff(bp) <= 0):
        raise ArgumentError("breakpoints must start at 0 and increase strictly")
    s = cfg.substitution
    u = bp ** (1.0 / s)

    j = np.arange(cfg.geometric_pieces)
    ga, gb = u[1] * 2.0 ** -(j + 1.0), u[1] * 2.0**-j
    a = np.concatenate([ga, u[1:-1]])
    b = np.concatenate([gb, u[2:]])
    cell_mid = 0.5 * (bp[:-1] + bp[1:])
    where_piece = np.concatenate([np.full(len(ga), cell_mid[0]), cell_mid[1:]])
    n_geo = len(ga)

    def level_sum(level):
        m = 2**level
        pts, w = _simpson_points(a, b, m)
        t = pts**s
        where = np.broadcast_to(where_piece[:, None], t.shape)
        f = np.asarray(integrand(t, where), dtype=float) * (s * pts ** (s - 1.0))
        pieces = np.sum(f * w, axis=1)
        if not np.all(np.isfinite(pieces)):
            raise QuadratureError("integrand is not finite on (0, b]")
        geo = pieces[:n_geo]
        last, prev = geo[-1], geo[-2]
        if last == 0.0:
            tail = 0.0
        else:
            r = last / prev if prev != 0.0 else np.inf
            if not 0.0 <= r < 1.0:
                raise QuadratureError(
                    "integrand does not decay geometrically towards t = 0 "
                    f"(ratio {r:.6g}); the improper integral may diverge",
                    (float(np.sum(pieces)),),
                )
            tail = last * r / (1.0 - r)
        return float(np.sum(pieces) + tail)

    simpson = [level_sum(1)]
    extrapolated = []
    for level in range(2, cfg.max_levels + 1):
        simpson.append(level_sum(level))
        extrapolated.append(simpson[-1] + (simpson[-1] - simpson[-2]) / 15.0)
        if len(extrapolated) >= 2 and abs(extrapolated[-1] - extrapolated[-2]) <= cfg.abs_tol:
            return Integral(extrapolated[-1], True, level, tuple(extrapolated[-2:]))
    result = Integral(extrapolated[-1], False, cfg.max_levels, tuple(extrapolated[-2:]))
    if strict:
        raise QuadratureError(
            f"no convergence to {cfg.abs_tol:g} within {cfg.max_levels} levels; "
            f"last estimates {result.estimates}",
            result.estimates,
        )
    return result


_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


def _gauss_panels(integrand, edges, subdivisions):
    where_panel = 0.5 * (edges[:-1] + edges[1:])
    x = np.linspace(0.0, 1.0, subdivisions + 1)
    a = (edges[:-1, None] + np.diff(edges)[:, None] * x[None, :-1]).ravel()
    b = (edges[:-1, None] + np.diff(edges)[:, None] * x[None, 1:]).ravel()
    where = np.repeat(where_panel, subdivisions)
    half = 0.5 * (b - a)
    pts = 0.5 * (a + b)[:, None] + half[:, None] * _GL_X[None, :]
    f = np.asarray(integrand(pts, np.broadcast_to(where[:, None], pts.shape)), dtype=float)
    return float(np.sum(f * _GL_W[None, :] * half[:, None]))


def integrate_regular(
    integrand: Callable, breakpoints, lo: float, hi: float, abs_tol: float = 1e-12, max_subdivisions=64
) -> float:
    """Composite 10-point Gauss-Legendre on ``[lo, hi]`` for a bounded integrand.

    Panels are the breakpoints inside ``(lo, hi)``; each panel is split into
    2, 4, ... equal parts until two passes agree to ``abs_tol`` (or
    ``max_subdivisions`` is reached).  ``integrand(t, where)`` as in
    :func:`integrate_singular`.
    """
    if not hi > lo:
        raise ArgumentError("empty integration interval")
    bp = np.asarray(breakpoints, dtype=float)
    edges = np.concatenate([[lo], bp[(bp > lo) & (bp < hi)], [hi]])
    m = 2
    prev = _gauss_panels(integrand, edges, m)
    while m < max_subdivisions:
        m *= 2
        cur = _gauss_panels(integrand, edges, m)
        if abs(cur - prev) <= abs_tol:
            return cur
        prev = cur
    return prev

"""Curves on ``[0, b]``: graded meshes, sampled curves and candidate paths.

A :class:`SampledCurve` always carries node values and slopes.  Curves built
from a formula also carry an ``evaluator`` so quadrature can sample them
between nodes; curves known only through samples (files, optimiser output)
are treated as their piecewise-linear interpolant.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .errors import ArgumentError, CurveFormatError

__all__ = [
    "Mesh",
    "SampledCurve",
    "make_mesh",
    "line_curve",
    "circle_curve",
    "analytic_curve",
    "curve_from_samples",
    "load_curve_csv",
    "save_curve_csv",
    "piecewise_linear",
    "BOUNDARY_TOL",
    "DEFAULT_GRADING",
]

BOUNDARY_TOL = 1e-9
DEFAULT_GRADING = 3.0

# evaluator(t, where) -> (values, slopes); ``where`` only matters for
# piecewise-linear data (see SampledCurve.evaluate)
Evaluator = Callable[..., "tuple[np.ndarray, np.ndarray]"]


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Mesh:
    """Strictly increasing nodes ``0 = t_0 < ... < t_n = b``.

    ``q`` is the grading exponent for meshes made by :func:`make_mesh`
    (``t_i = b (i/n)^q``) and ``None`` for meshes read from data.
    """

    nodes: np.ndarray
    q: Optional[float] = None

    @property
    def n(self) -> int:
        return len(self.nodes) - 1

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    @classmethod
    def from_nodes(cls, nodes, q=None) -> "Mesh":
        nodes = _frozen(nodes)
        if nodes.ndim != 1 or len(nodes) < 3:
            raise ArgumentError("a mesh needs at least 3 nodes")
        if nodes[0] != 0.0:
            raise ArgumentError("mesh must start at t = 0")
        if np.any(np.diff(nodes) <= 0.0):
            raise ArgumentError("mesh nodes must be strictly increasing")
        return cls(nodes, q)

    def refined(self) -> "Mesh":
        """The mesh with ``2n`` cells and the same grading; it contains these nodes."""
        if self.q is None:
            raise ArgumentError("only graded meshes can be refined")
        return make_mesh(2 * self.n, self.b, self.q)


def make_mesh(n: int, b: float, q: float = DEFAULT_GRADING) -> Mesh:
    """Graded mesh with nodes ``b (i/n)^q`` clustered at the singular end ``t=0``."""
    if int(n) != n or n < 8:
        raise ArgumentError(f"n must be an integer >= 8, got {n!r}")
    if not b > 0:
        raise ArgumentError(f"b must be positive, got {b!r}")
    if not q >= 1:
        raise ArgumentError(f"grading exponent must be >= 1, got {q!r}")
    n = int(n)
    nodes = b * (np.arange(n + 1) / n) ** q
    nodes[-1] = b
    return Mesh(_frozen(nodes), float(q))


def piecewise_linear(nodes, values, t, where=None):
    """Interpolated values and chord slopes; ``where`` picks the cell (see SampledCurve)."""
    loc = t if where is None else np.asarray(where, dtype=float)
    cell = np.clip(np.searchsorted(nodes, loc, side="right") - 1, 0, len(nodes) - 2)
    h = nodes[cell + 1] - nodes[cell]
    s = (values[cell + 1] - values[cell]) / h
    return values[cell] + s * (t - nodes[cell]), s


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """A curve ``gamma`` on a mesh with ``gamma(0) = 0`` and ``gamma(b) = beta``.

    ``slopes[0]`` is NaN: admissible curves need only be differentiable on
    ``(0, b]``.  ``breakpoints`` lists the points where the curve may fail to
    be smooth; quadrature panels are aligned with them.
    """

    mesh: Mesh
    values: np.ndarray
    slopes: np.ndarray
    beta: float
    kind: str = "samples"
    evaluator: Optional[Evaluator] = field(default=None, repr=False)
    breakpoints: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        object.__setattr__(self, "slopes", _frozen(self.slopes))
        bp = self.mesh.nodes if self.breakpoints is None else self.breakpoints
        object.__setattr__(self, "breakpoints", _frozen(np.unique(bp)))
        validate_membership(self)

    @property
    def b(self) -> float:
        return self.mesh.b

    @property
    def t(self) -> np.ndarray:
        return self.mesh.nodes

    def evaluate(self, t, where=None):
        """Value and slope at points ``t`` in ``(0, b]``.

        For piecewise-linear curves the slope on a cell is the chord slope;
        ``where`` (same shape as ``t``) selects the cell, which matters only
        when ``t`` sits exactly on a node.
        """
        t = np.asarray(t, dtype=float)
        if self.evaluator is not None:
            return self.evaluator(t, where)
        return piecewise_linear(self.mesh.nodes, self.values, t, where)

    def perturbed(self, v, h: float = 1.0) -> "SampledCurve":
        """The curve ``gamma + h v`` for a perturbation ``v`` (see ``variational``)."""
        base = self

        def evaluator(t, where=None):
            g, dg = base.evaluate(t, where)
            pv, dpv = v.evaluate(t)
            return g + h * pv, dg + h * dpv

        return SampledCurve(
            self.mesh,
            self.values + h * v.values,
            self.slopes + h * v.slopes,
            self.beta,
            f"{self.kind}+perturbation",
            evaluator,
            np.union1d(self.breakpoints, v.knots),
        )


def validate_membership(curve: SampledCurve, tol: float = BOUNDARY_TOL) -> None:
    """Check the structural conditions for membership in the admissible set.

    ``gamma(0) = 0``, ``gamma(b) = beta``, ``gamma > 0`` on ``(0, b]`` and
    finite slopes there.  Convergence of the travel-time integral is left to
    the quadrature diagnostics.
    """
    v = curve.values
    if v.shape != curve.mesh.nodes.shape or curve.slopes.shape != v.shape:
        raise ArgumentError("values/slopes do not match the mesh")
    if abs(v[0]) > tol:
        raise CurveFormatError(f"gamma(0) = {float(v[0])!r}, expected 0", row=0)
    if abs(v[-1] - curve.beta) > tol * max(1.0, abs(curve.beta)):
        raise CurveFormatError(
            f"gamma(b) = {float(v[-1])!r}, expected beta = {curve.beta!r}", row=len(v) - 1
        )
    bad = np.flatnonzero(~(v[1:] > 0.0))
    if bad.size:
        i = int(bad[0]) + 1
        raise CurveFormatError(f"gamma = {float(v[i])!r} is not positive", row=i)
    bad = np.flatnonzero(~np.isfinite(curve.slopes[1:]))
    if bad.size:
        i = int(bad[0]) + 1
        raise CurveFormatError("slope is not finite", row=i)


def _check_problem(b, beta):
    if not (b > 0 and beta > 0):
        raise ArgumentError(f"b and beta must be positive, got b={b!r}, beta={beta!r}")


def _check_mesh(mesh: Mesh, b: float):
    if abs(mesh.b - b) > BOUNDARY_TOL * max(1.0, b):
        raise ArgumentError(f"mesh ends at {mesh.b!r} but b = {b!r}")


def analytic_curve(
    func: Callable, dfunc: Callable, beta: float, mesh: Mesh, kind: str = "analytic"
) -> SampledCurve:
    """Sample ``func`` and its derivative ``dfunc`` on ``mesh``.

    Both callables are kept for quadrature between nodes.
    """
    t = mesh.nodes
    values = np.asarray(func(t), dtype=float).copy()
    slopes = np.empty_like(values)
    slopes[0] = np.nan
    slopes[1:] = dfunc(t[1:])

    def evaluator(s, where=None):
        return np.asarray(func(s), dtype=float), np.asarray(dfunc(s), dtype=float)

    return SampledCurve(mesh, values, slopes, float(beta), kind, evaluator)


def line_curve(b: float, beta: float, mesh: Mesh) -> SampledCurve:
    """The straight segment ``gamma(t) = (beta/b) t``."""
    _check_problem(b, beta)
    _check_mesh(mesh, b)
    m = beta / b
    return analytic_curve(
        lambda t: m * np.asarray(t, dtype=float),
        lambda t: np.full(np.shape(t), m),
        beta,
        mesh,
        "line",
    )


def circle_radius(b: float, beta: float) -> float:
    """Radius of the circle through ``(0,0)`` and ``(b,beta)`` centred on the t-axis."""
    return (b * b + beta * beta) / (2.0 * b)


def circle_curve(b: float, beta: float, mesh: Mesh) -> SampledCurve:
    """Circular arc with a vertical tangent at the origin.

    ``gamma(t) = sqrt(2Rt - t^2)`` with ``R = (b^2 + beta^2) / (2b)``, so the
    centre is ``(R, 0)`` and the arc ends at ``(b, beta)``.
    """
    _check_problem(b, beta)
    _check_mesh(mesh, b)
    r = circle_radius(b, beta)

    def func(t):
        t = np.asarray(t, dtype=float)
        return np.sqrt(np.maximum(t * (2.0 * r - t), 0.0))

    def dfunc(t):
        t = np.asarray(t, dtype=float)
        return (r - t) / np.sqrt(t * (2.0 * r - t))

    return analytic_curve(func, dfunc, beta, mesh, "circle")


def curve_from_samples(
    mesh: Mesh, values, beta: float, kind: str = "samples"
) -> SampledCurve:
    """Sampled curve with second-order central-difference slopes."""
    values = np.asarray(values, dtype=float)
    if values.shape != mesh.nodes.shape:
        raise ArgumentError("values do not match the mesh")
    slopes = np.gradient(values, mesh.nodes, edge_order=2)
    slopes[0] = np.nan
    return SampledCurve(mesh, values, slopes, float(beta), kind)


def save_curve_csv(curve: SampledCurve, path) -> None:
    """Write ``t,gamma`` rows with 17 significant digits and LF line endings."""
    lines = ["t,gamma"]
    lines += [f"{t:.17g},{g:.17g}" for t, g in zip(curve.t, curve.values)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_curve_csv(path, b: float, beta: float) -> SampledCurve:
    """Read a ``t,gamma`` file and validate it as an admissible curve on ``[0, b]``.

    Raises :class:`CurveFormatError` naming the offending data row.
    """
    _check_problem(b, beta)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "gamma"]:
            raise CurveFormatError(f"expected header 't,gamma', got {header!r}")
        ts, gs = [], []
        for row, rec in enumerate(reader):
            if not rec:
                continue
            if len(rec) != 2:
                raise CurveFormatError(f"expected 2 fields, got {len(rec)}", row=row)
            try:
                t, g = float(rec[0]), float(rec[1])
            except ValueError:
                raise CurveFormatError(f"unparseable number in {rec!r}", row=row) from None
            if not (math.isfinite(t) and math.isfinite(g)):
                raise CurveFormatError("non-finite value", row=row)
            if ts and t <= ts[-1]:
                raise CurveFormatError("t is not strictly increasing", row=row)
            ts.append(t)
            gs.append(g)
    if len(ts) < 3:
        raise CurveFormatError("a curve file needs at least 3 rows")
    if abs(ts[0]) > BOUNDARY_TOL:
        raise CurveFormatError(f"first t = {float(ts[0])!r}, expected 0", row=0)
    if abs(ts[-1] - b) > BOUNDARY_TOL * max(1.0, b):
        raise CurveFormatError(f"last t = {float(ts[-1])!r}, expected b = {b!r}", row=len(ts) - 1)
    ts[0] = 0.0
    mesh = Mesh.from_nodes(ts)
    return curve_from_samples(mesh, gs, beta, kind=f"file:{Path(path).name}")

"""Direct minimisation of the travel time in the variable ``delta = sqrt(2 gamma)``.

With ``gamma = delta^2 / 2`` the integrand ``sqrt((1 + gamma'^2) / gamma)``
becomes ``sqrt(2) M(delta, delta')`` with ``M(x, y) = sqrt(x^-2 + y^2)``.
``M`` is jointly strictly convex on ``x > 0`` while the original integrand is
not, so a descent method on a convex discretisation of ``int M`` finds the
global discrete minimiser.  Comparing it with the closed-form cycloid is an
optimality check that does not rely on the Euler-Lagrange equation.

Discretisation (one ``M`` evaluation per cell)::

    F(delta) = sum_i h_i M((delta_i + delta_{i+1}) / 2, (delta_{i+1} - delta_i) / h_i)

The first cell uses ``delta_0 = 0``; its midpoint ``delta_1 / 2`` stays
positive, so every term is finite.  Cell terms are convex in
``(delta_i, delta_{i+1})`` because they are ``M`` composed with a linear map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from . import records
from .curves import Mesh, SampledCurve, curve_from_samples, piecewise_linear, save_curve_csv
from .cycloid_solver import BrachProblem
from .errors import ArgumentError, CurveFormatError
from .lagrangians import transformed_lagrangian
from .quadrature import Integral, QuadratureConfig, integrate_singular

__all__ = [
    "TransformedCurve",
    "MinimizeConfig",
    "MinimizeOutcome",
    "METHODS",
    "transform",
    "transformed_time",
    "discrete_objective",
    "discrete_gradient",
    "discrete_hessian",
    "line_start",
    "minimize_direct",
]

_M = transformed_lagrangian()
METHODS = ("gradient", "scaled", "newton")


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TransformedCurve:
    """``delta`` on a mesh, with ``delta_0 = 0`` and ``delta_n = sqrt(2 beta)``.

    ``beta`` is the depth of the original problem.  Like
    :class:`~brachistochrone.curves.SampledCurve` it quadratures through
    ``evaluate`` and ``breakpoints``.
    """

    mesh: Mesh
    values: np.ndarray
    slopes: np.ndarray
    beta: float
    evaluator: Optional[object] = field(default=None, repr=False)
    breakpoints: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        object.__setattr__(self, "slopes", _frozen(self.slopes))
        bp = self.mesh.nodes if self.breakpoints is None else self.breakpoints
        object.__setattr__(self, "breakpoints", _frozen(np.unique(bp)))
        v = self.values
        if v.shape != self.mesh.nodes.shape or self.slopes.shape != v.shape:
            raise ArgumentError("values/slopes do not match the mesh")
        if v[0] != 0.0:
            raise CurveFormatError(f"delta(0) = {float(v[0])!r}, expected 0", row=0)
        if v[-1] != self.endpoint:
            raise CurveFormatError(
                f"delta(b) = {float(v[-1])!r}, expected sqrt(2 beta) = {self.endpoint!r}", row=len(v) - 1
            )
        bad = np.flatnonzero(~(v[1:] > 0.0))
        if bad.size:
            i = int(bad[0]) + 1
            raise CurveFormatError(f"delta = {float(v[i])!r} is not positive", row=i)

    @property
    def endpoint(self) -> float:
        return math.sqrt(2.0 * self.beta)

    @property
    def b(self) -> float:
        return self.mesh.b

    @property
    def t(self):
        return self.mesh.nodes

    def evaluate(self, t, where=None):
        t = np.asarray(t, dtype=float)
        if self.evaluator is not None:
            return self.evaluator(t, where)
        return piecewise_linear(self.mesh.nodes, self.values, t, where)

    @classmethod
    def from_values(cls, mesh: Mesh, values, beta: float) -> "TransformedCurve":
        """Node values treated as piecewise linear; node slopes by central differences."""
        values = np.array(values, dtype=float)
        values[0] = 0.0
        values[-1] = math.sqrt(2.0 * beta)
        slopes = np.gradient(values, mesh.nodes, edge_order=2)
        slopes[0] = np.nan
        return cls(mesh, values, slopes, float(beta))

    def inverse(self) -> SampledCurve:
        """``gamma = delta^2 / 2``.

        A curve made by :func:`transform` maps back to its source (with the
        source's evaluator); a piecewise-linear ``delta`` gives sampled
        ``gamma`` values with central-difference slopes.
        """
        values = 0.5 * self.values**2
        values[-1] = self.beta
        if self.evaluator is None:
            return curve_from_samples(self.mesh, values, self.beta, "direct")
        src = self.evaluator

        def evaluator(t, where=None):
            d, dd = src(t, where)
            return 0.5 * d * d, d * dd

        slopes = self.values * self.slopes
        return SampledCurve(
            self.mesh, values, slopes, self.beta, "inverse", evaluator, self.breakpoints
        )


def transform(curve: SampledCurve) -> TransformedCurve:
    """``delta = sqrt(2 gamma)`` node-wise and between nodes, ``delta' = gamma' / delta``."""
    values = np.sqrt(2.0 * curve.values)
    values[0] = 0.0
    values[-1] = math.sqrt(2.0 * curve.beta)
    slopes = np.full_like(values, np.nan)
    slopes[1:] = curve.slopes[1:] / values[1:]

    def evaluator(t, where=None):
        g, dg = curve.evaluate(t, where)
        d = np.sqrt(2.0 * g)
        return d, dg / d

    return TransformedCurve(curve.mesh, values, slopes, curve.beta, evaluator, curve.breakpoints)


def transformed_time(
    delta: TransformedCurve, cfg: QuadratureConfig = QuadratureConfig(), strict: bool = True
) -> Integral:
    """``int_0^b M(delta, delta') dt``, with the same quadrature as the travel time."""

    def integrand(t, where):
        d, dd = delta.evaluate(t, where)
        return _M(d, dd)

    return integrate_singular(integrand, delta.breakpoints, cfg, strict)


# --- discrete objective -----------------------------------------------------


def _cells(delta, h):
    return 0.5 * (delta[:-1] + delta[1:]), np.diff(delta) / h


def discrete_objective(delta, mesh: Mesh) -> float:
    h = mesh.widths
    x, y = _cells(np.asarray(delta, dtype=float), h)
    return float(np.sum(h * _M.f(x, y)))


def discrete_gradient(delta, mesh: Mesh):
    """Objective and its gradient; the two boundary components are zeroed."""
    h = mesh.widths
    delta = np.asarray(delta, dtype=float)
    x, y = _cells(delta, h)
    mx, my = _M.fx(x, y), _M.fy(x, y)
    g = np.zeros_like(delta)
    g[:-1] += 0.5 * h * mx - my
    g[1:] += 0.5 * h * mx + my
    g[0] = g[-1] = 0.0
    return float(np.sum(h * _M.f(x, y))), g


def discrete_hessian(delta, mesh: Mesh):
    """Tridiagonal Hessian as ``(diagonal, off_diagonal)`` over all nodes."""
    h = mesh.widths
    x, y = _cells(np.asarray(delta, dtype=float), h)
    a, b, c = _M.fxx(x, y), _M.fxy(x, y), _M.fyy(x, y)
    diag = np.zeros(len(h) + 1)
    diag[:-1] += 0.25 * h * a - b + c / h
    diag[1:] += 0.25 * h * a + b + c / h
    off = 0.25 * h * a - c / h
    return diag, off


def line_start(p: BrachProblem, mesh: Mesh) -> np.ndarray:
    """Transform of the straight line, the default initial iterate."""
    return np.sqrt(2.0 * p.beta * mesh.nodes / p.b)


# --- optimiser --------------------------------------------------------------


@dataclass(frozen=True)
class MinimizeConfig:
    """Stopping and line-search parameters.

    ``method`` selects the search direction: ``gradient`` (plain projected
    gradient), ``scaled`` (gradient scaled by the inverse Hessian diagonal)
    or ``newton`` (tridiagonal Newton direction).  All three share the
    projection, the Armijo line search and the stopping test.
    """

    max_iterations: int = 5000
    grad_tol: float = 1e-8
    floor: float = 1e-9
    backtrack: float = 0.5
    armijo: float = 1e-4
    method: str = "scaled"
    max_backtracks: int = 60

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ArgumentError("max_iterations must be >= 1")
        for name in ("grad_tol", "floor", "armijo"):
            if not getattr(self, name) > 0:
                raise ArgumentError(f"{name} must be positive")
        if not 0 < self.backtrack < 1:
            raise ArgumentError("backtrack must lie in (0, 1)")
        if not 0 < self.armijo < 1:
            raise ArgumentError("armijo must lie in (0, 1)")
        if self.method not in METHODS:
            raise ArgumentError(f"method must be one of {METHODS}, got {self.method!r}")


@dataclass(frozen=True, eq=False)
class MinimizeOutcome:
    delta: TransformedCurve
    gamma: SampledCurve
    objective: float
    iterations: int
    converged: bool
    grad_norm: float
    sup_distance: Optional[float] = None
    history: tuple = ()
    max_abs_dy: float = 0.0
    method: str = "scaled"

    @property
    def travel_time(self) -> float:
        """The discrete objective in units of the original functional."""
        return math.sqrt(2.0) * self.objective

    def to_record(self) -> dict:
        return {
            "objective": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "sup_distance": self.sup_distance,
        }

    def save(self, csv_path) -> Path:
        """Write the mapped-back curve as CSV and the summary next to it as ``.json``."""
        csv_path = Path(csv_path)
        save_curve_csv(self.gamma, csv_path)
        sidecar = csv_path.with_suffix(".json")
        sidecar.write_text(records.dumps(self.to_record()) + "\n", encoding="utf-8", newline="\n")
        return sidecar


def _projected_norm(g, delta, floor):
    # components pushing an iterate that sits on the floor further down are not movable
    stuck = (delta <= floor) & (g > 0)
    return float(np.max(np.abs(np.where(stuck, 0.0, g))))


def _newton_direction(delta, g, mesh):
    diag, off = discrete_hessian(delta, mesh)
    n = len(delta)
    ab = np.zeros((3, n - 2))
    ab[0, 1:] = off[1:-1]
    ab[1] = diag[1:-1]
    ab[2, :-1] = off[1:-1]
    d = np.zeros(n)
    d[1:-1] = solve_banded((1, 1), ab, g[1:-1])
    return d


def minimize_direct(
    p: BrachProblem,
    mesh: Mesh,
    cfg: MinimizeConfig = MinimizeConfig(),
    initial=None,
    reference: Optional[SampledCurve] = None,
) -> MinimizeOutcome:
    """Minimise the discrete objective over the interior values of ``delta``.

    ``initial`` is an array of node values (boundary entries are overwritten);
    the default is :func:`line_start`.  ``reference``, when given, is compared
    node-wise with the mapped-back ``gamma``.  Running out of iterations or
    of line-search steps returns ``converged=False``.
    """
    if abs(mesh.b - p.b) > 1e-9 * max(1.0, p.b):
        raise ArgumentError(f"mesh ends at {mesh.b!r} but b = {p.b!r}")
    delta = line_start(p, mesh) if initial is None else np.array(initial, dtype=float)
    if delta.shape != mesh.nodes.shape:
        raise ArgumentError("initial iterate does not match the mesh")
    delta[0] = 0.0
    delta[-1] = math.sqrt(2.0 * p.beta)
    delta[1:-1] = np.maximum(delta[1:-1], cfg.floor)
    h = mesh.widths

    F, g = discrete_gradient(delta, mesh)
    history = [F]
    max_dy = float(np.max(np.abs(_M.fy(*_cells(delta, h)))))
    prev = None
    converged = False
    it = 0
    gnorm = _projected_norm(g, delta, cfg.floor)
    while True:
        if gnorm <= cfg.grad_tol:
            converged = True
            break
        if it >= cfg.max_iterations:
            break

        if cfg.method == "newton":
            direction, step = _newton_direction(delta, g, mesh), 1.0
            if not np.dot(direction, g) > 0:
                direction = g
        else:
            if cfg.method == "scaled":
                scale = discrete_hessian(delta, mesh)[0]
                scale[0] = scale[-1] = 1.0
            else:
                scale = np.ones_like(delta)
            direction = g / scale
            step = 1.0
            if prev is not None:
                # Barzilai-Borwein step in the metric of ``scale``
                s, y = delta - prev[0], g - prev[1]
                sy = np.dot(s, y)
                if sy > 0:
                    step = float(np.clip(np.dot(s, s * scale) / sy, 1e-12, 1e12))

        accepted = None
        for _ in range(cfg.max_backtracks):
            trial = delta - step * direction
            trial[1:-1] = np.maximum(trial[1:-1], cfg.floor)
            trial[0], trial[-1] = 0.0, delta[-1]
            Ft = discrete_objective(trial, mesh)
            if Ft <= F - cfg.armijo * np.dot(g, delta - trial):
                accepted = trial
                break
            step *= cfg.backtrack
        if accepted is None:
            break
        prev = (delta, g)
        delta = accepted
        F, g = discrete_gradient(delta, mesh)
        gnorm = _projected_norm(g, delta, cfg.floor)
        max_dy = max(max_dy, float(np.max(np.abs(_M.fy(*_cells(delta, h))))))
        history.append(F)
        it += 1

    dcurve = TransformedCurve.from_values(mesh, delta, p.beta)
    gamma = dcurve.inverse()
    sup = None
    if reference is not None:
        sup = float(np.max(np.abs(gamma.values - reference.values)))
    return MinimizeOutcome(
        dcurve, gamma, F, it, converged, gnorm, sup, tuple(history), max_dy, cfg.method
    )

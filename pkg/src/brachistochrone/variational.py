"""The travel-time functional and its stationarity diagnostics.

``travel_time`` evaluates ``int_0^b L(gamma, gamma') dt`` as an improper
integral.  Away from the singular end the first variation

    d_v L(gamma) = int_c^b (L_x[gamma] v + L_y[gamma] v') dt

is available for directions ``v`` that vanish on ``[0, c]`` and at ``b``; it
vanishes for every such ``v`` exactly when ``gamma`` satisfies the
Euler-Lagrange equation ``L_x[gamma] = d/dt L_y[gamma]`` on ``(c, b]``.
For autonomous Lagrangians the first integral ``L - L_y gamma'`` (Beltrami)
is constant along stationary curves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .curves import Mesh, SampledCurve
from .errors import ArgumentError, DomainError
from .lagrangians import Lagrangian, brachistochrone_lagrangian
from .quadrature import Integral, QuadratureConfig, integrate_regular, integrate_singular

__all__ = [
    "QuadratureConfig",
    "Perturbation",
    "HatFunction",
    "ResidualReport",
    "DEFAULT_CUTOFF_FRACTION",
    "travel_time",
    "directional_derivative",
    "finite_difference_derivative",
    "el_residual",
    "beltrami_residual",
    "weak_form_residual",
    "make_admissible_perturbation",
    "hat_functions",
]

DEFAULT_CUTOFF_FRACTION = 0.1


def _default_lag(lag):
    return brachistochrone_lagrangian() if lag is None else lag


def travel_time(
    curve: SampledCurve,
    lag: Optional[Lagrangian] = None,
    cfg: QuadratureConfig = QuadratureConfig(),
    strict: bool = True,
) -> Integral:
    """``int_0^b lag(gamma, gamma') dt`` for a curve in the admissible set.

    Raises :class:`~brachistochrone.errors.QuadratureError` when refinement
    does not settle (``strict=False`` returns the unconverged estimate).
    """
    lag = _default_lag(lag)

    def integrand(t, where):
        g, dg = curve.evaluate(t, where)
        return lag(g, dg)

    return integrate_singular(integrand, curve.breakpoints, cfg, strict)


def _bspline3(x):
    """Uniform cubic B-spline on ``[0, 4]`` and its derivative."""
    x = np.asarray(x, dtype=float)
    conds = [(x >= 0) & (x < 1), (x >= 1) & (x < 2), (x >= 2) & (x < 3), (x >= 3) & (x <= 4)]
    val = np.select(
        conds,
        [
            x**3 / 6,
            (-3 * x**3 + 12 * x**2 - 12 * x + 4) / 6,
            (3 * x**3 - 24 * x**2 + 60 * x - 44) / 6,
            (4 - x) ** 3 / 6,
        ],
        0.0,
    )
    der = np.select(
        conds,
        [x**2 / 2, (-9 * x**2 + 24 * x - 12) / 6, (9 * x**2 - 48 * x + 60) / 6, -((4 - x) ** 2) / 2],
        0.0,
    )
    return val, der


@dataclass(frozen=True, eq=False)
class Perturbation:
    """A C^2 direction ``v = sum_j a_j B_j`` of cubic B-splines.

    Every B-spline is supported inside ``[cutoff, b]``, so ``v`` vanishes on
    ``[0, cutoff]`` and near ``b``.  ``values``/``slopes`` sample ``v`` on the
    mesh it was built for.
    """

    cutoff: float
    b: float
    knots: np.ndarray
    coefficients: np.ndarray
    mesh: Mesh
    values: np.ndarray
    slopes: np.ndarray

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        step = self.knots[1] - self.knots[0]
        val = np.zeros(t.shape)
        der = np.zeros(t.shape)
        for j, a in enumerate(self.coefficients):
            bv, bd = _bspline3((t - self.knots[j]) / step)
            val += a * bv
            der += a * bd
        return val, der / step

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


def make_admissible_perturbation(
    seed: int, c: float, b: float, amplitude: float, mesh: Mesh, n_basis: Optional[int] = None
) -> Perturbation:
    """Pseudo-random admissible direction with ``sup |v| <= amplitude``.

    ``n_basis`` B-splines on uniform knots over ``[c, b]`` (drawn from 4..11 if
    not given) with coefficients uniform in ``[-amplitude, amplitude]``; the
    bound holds because the B-splines sum to at most one.
    """
    if not 0 < c < b:
        raise ArgumentError(f"need 0 < c < b, got c={c!r}, b={b!r}")
    if amplitude < 0:
        raise ArgumentError("amplitude must be non-negative")
    rng = np.random.default_rng(seed)
    if n_basis is None:
        n_basis = int(rng.integers(4, 12))
    knots = np.linspace(c, b, n_basis + 4)
    coef = amplitude * rng.uniform(-1.0, 1.0, n_basis)
    proto = Perturbation(c, b, knots, coef, mesh, np.empty(0), np.empty(0))
    values, slopes = proto.evaluate(mesh.nodes)
    return Perturbation(c, b, knots, coef, mesh, values, slopes)


def _check_perturbation(curve: SampledCurve, v: Perturbation):
    if abs(v.b - curve.b) > 1e-12 * max(1.0, curve.b):
        raise ArgumentError("perturbation and curve live on different intervals")
    if not v.cutoff > 0:
        raise ArgumentError("the perturbation must vanish near t = 0")


def directional_derivative(
    curve: SampledCurve,
    v: Perturbation,
    lag: Optional[Lagrangian] = None,
    cfg: QuadratureConfig = QuadratureConfig(),
) -> float:
    """First variation of the travel time at ``curve`` in direction ``v``.

    The integrand is regular on ``[cutoff, b]``, where ``v`` lives.
    """
    lag = _default_lag(lag)
    _check_perturbation(curve, v)

    def integrand(t, where):
        g, dg = curve.evaluate(t, where)
        pv, dpv = v.evaluate(t)
        return lag.dx(g, dg) * pv + lag.dy(g, dg) * dpv

    bp = np.union1d(curve.breakpoints, v.knots)
    return integrate_regular(integrand, bp, v.cutoff, curve.b, abs_tol=1e-3 * cfg.abs_tol)


def finite_difference_derivative(
    curve: SampledCurve,
    v: Perturbation,
    lag: Optional[Lagrangian] = None,
    h: float = 1e-5,
    cfg: QuadratureConfig = QuadratureConfig(abs_tol=1e-13),
) -> float:
    """``(T(gamma + h v) - T(gamma - h v)) / 2h`` from two full travel times.

    Only values of ``lag`` enter, never its partials, which makes this an
    independent check of :func:`directional_derivative`.
    """
    lag = _default_lag(lag)
    _check_perturbation(curve, v)
    try:
        plus = curve.perturbed(v, h)
        minus = curve.perturbed(v, -h)
    except ArgumentError as exc:
        raise DomainError(f"gamma +- h v leaves the admissible set: {exc}") from exc
    tp = travel_time(plus, lag, cfg, strict=False).value
    tm = travel_time(minus, lag, cfg, strict=False).value
    return (tp - tm) / (2.0 * h)


@dataclass(frozen=True, eq=False)
class ResidualReport:
    """Node-wise residuals of one stationarity test.

    ``kind`` is ``"euler-lagrange"``, ``"beltrami"`` or ``"weak"``.  ``t``
    holds the interior nodes (or test-function centres for the weak form) and
    ``values`` the residuals there; for the Beltrami test ``values`` are the
    raw first-integral values and ``constant`` their median.  ``sup`` and
    ``rms`` are taken over entries with ``t >= cutoff`` (after subtracting the
    median for Beltrami).
    """

    kind: str
    t: np.ndarray
    values: np.ndarray
    cutoff: float
    sup: float
    rms: float
    constant: Optional[float] = None
    deviation: Optional[float] = None
    k_values: Optional[np.ndarray] = None
    k_deviation: Optional[float] = None

    def to_record(self) -> dict:
        rec = {
            "kind": self.kind,
            "cutoff": self.cutoff,
            "sup": self.sup,
            "rms": self.rms,
            "t": self.t.tolist(),
            "values": self.values.tolist(),
        }
        if self.constant is not None:
            rec["constant"] = self.constant
            rec["deviation"] = self.deviation
        if self.k_values is not None:
            rec["k_median"] = float(np.median(self.k_values))
            rec["k_deviation"] = self.k_deviation
        return rec


def _norms(t, r, cutoff):
    sel = r[t >= cutoff]
    if sel.size == 0:
        return 0.0, 0.0
    return float(np.max(np.abs(sel))), float(np.sqrt(np.mean(sel**2)))


def _cutoff(curve, c):
    return DEFAULT_CUTOFF_FRACTION * curve.b if c is None else float(c)


def _derivative(f, t):
    """Second-order derivative of node data on a non-uniform grid.

    Built from divided differences, so constant data give exactly zero
    (``np.gradient`` leaves rounding residue on strongly graded meshes).
    """
    h = np.diff(t)
    d = np.diff(f) / h
    out = np.empty_like(f)
    out[1:-1] = (h[1:] * d[:-1] + h[:-1] * d[1:]) / (h[:-1] + h[1:])
    out[0] = d[0] - h[0] * (d[1] - d[0]) / (h[0] + h[1])
    out[-1] = d[-1] + h[-1] * (d[-1] - d[-2]) / (h[-1] + h[-2])
    return out


def el_residual(
    curve: SampledCurve, lag: Optional[Lagrangian] = None, cutoff: Optional[float] = None
) -> ResidualReport:
    """Strong residual ``L_x[gamma] - d/dt L_y[gamma]`` at the interior nodes.

    ``d/dt`` acts on the composed node values ``L_y(gamma_i, gamma'_i)`` through
    second-order differences on the (possibly non-uniform) mesh.
    """
    lag = _default_lag(lag)
    t = curve.t[1:]
    g, dg = curve.values[1:], curve.slopes[1:]
    momentum = lag.dy(g, dg)
    r = lag.dx(g, dg) - _derivative(momentum, t)
    c = _cutoff(curve, cutoff)
    sup, rms = _norms(t, r, c)
    return ResidualReport("euler-lagrange", t, r, c, sup, rms)


def beltrami_residual(
    curve: SampledCurve, lag: Optional[Lagrangian] = None, cutoff: Optional[float] = None
) -> ResidualReport:
    """First integral ``L[gamma] - L_y[gamma] gamma'`` at the interior nodes.

    The median estimates the constant.  For the brachistochrone Lagrangian the
    report also carries ``k_i = gamma_i (1 + gamma'_i^2)``, constant (and equal
    to ``1/c^2``) along the minimiser.
    """
    lag = _default_lag(lag)
    t = curve.t[1:]
    g, dg = curve.values[1:], curve.slopes[1:]
    bel = lag(g, dg) - lag.dy(g, dg) * dg
    const = float(np.median(bel))
    c = _cutoff(curve, cutoff)
    sup, rms = _norms(t, bel - const, c)
    k_values = k_dev = None
    if lag.name == "brach":
        k_values = g * (1.0 + dg * dg)
        k_dev = float(np.max(np.abs(k_values - np.median(k_values))))
    return ResidualReport(
        "beltrami",
        t,
        bel,
        c,
        sup,
        rms,
        constant=const,
        deviation=float(np.max(np.abs(bel - const))),
        k_values=k_values,
        k_deviation=k_dev,
    )


@dataclass(frozen=True)
class HatFunction:
    """C^1 hat of height 1 on ``[center - half_width, center + half_width]``.

    A scaled quadratic B-spline: quadratic ramps meeting with matching slopes.
    """

    center: float
    half_width: float

    @property
    def breakpoints(self):
        w = 2.0 * self.half_width / 3.0
        lo = self.center - self.half_width
        return lo + w * np.arange(4)

    def evaluate(self, t):
        w = 2.0 * self.half_width / 3.0
        x = (np.asarray(t, dtype=float) - (self.center - self.half_width)) / w
        conds = [(x >= 0) & (x < 1), (x >= 1) & (x < 2), (x >= 2) & (x <= 3)]
        val = np.select(conds, [x * x / 2, (-2 * x * x + 6 * x - 3) / 2, (3 - x) ** 2 / 2], 0.0)
        der = np.select(conds, [x, 3 - 2 * x, x - 3], 0.0)
        return val / 0.75, der / (0.75 * w)


def hat_functions(n_test: int, c: float, b: float):
    """``n_test`` overlapping hats centred at equispaced points of ``(c, b)``.

    Neighbouring centres are ``(b - c)/(n_test + 1)`` apart and each hat spans
    the two gaps around its centre, so all supports lie in ``[c, b]``.
    """
    if n_test < 1:
        raise ArgumentError("n_test must be >= 1")
    if not 0 < c < b:
        raise ArgumentError(f"need 0 < c < b, got c={c!r}, b={b!r}")
    gap = (b - c) / (n_test + 1)
    return [HatFunction(c + (j + 1) * gap, gap) for j in range(n_test)]


def weak_form_residual(
    curve: SampledCurve,
    lag: Optional[Lagrangian] = None,
    n_test: int = 100,
    c: Optional[float] = None,
    cfg: QuadratureConfig = QuadratureConfig(),
) -> ResidualReport:
    """``w_j = int (L_x[gamma] v_j + L_y[gamma] v_j') dt`` for hat test functions.

    All ``w_j`` vanish for a stationary curve; unlike :func:`el_residual` no
    derivative of sampled data is taken.
    """
    lag = _default_lag(lag)
    c = _cutoff(curve, c)
    hats = hat_functions(n_test, c, curve.b)
    out = np.empty(n_test)
    for j, hat in enumerate(hats):

        def integrand(t, where, hat=hat):
            g, dg = curve.evaluate(t, where)
            pv, dpv = hat.evaluate(t)
            return lag.dx(g, dg) * pv + lag.dy(g, dg) * dpv

        bp = hat.breakpoints
        bp = np.union1d(bp, curve.breakpoints[(curve.breakpoints > bp[0]) & (curve.breakpoints < bp[-1])])
        out[j] = integrate_regular(integrand, bp, bp[0], bp[-1], abs_tol=1e-3 * cfg.abs_tol)
    centers = np.array([h.center for h in hats])
    sup, rms = _norms(centers, out, c)
    return ResidualReport("weak", centers, out, c, sup, rms)

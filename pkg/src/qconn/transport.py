"""Parallel transport along curves in the base by ordered exponentials."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import GridMismatchError, TransportError
from .forms import OpOneForm, curvature, unitarity_error
from .grid import OperatorMatrix, WaveState, max_abs


@dataclass(frozen=True, eq=False)
class Curve:
    """Polyline through base points, traversed in order.

    A single point is the zero-length curve.  A closed curve repeats its first
    point at the end.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.shape[0] < 1:
            raise ValueError("a curve needs at least one point")
        if pts.shape[0] > 1 and np.any(np.all(np.diff(pts, axis=0) == 0, axis=1)):
            raise ValueError("consecutive curve points must be distinct")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @classmethod
    def segment(cls, start, end) -> "Curve":
        return cls([start, end])

    @classmethod
    def parametric(cls, fn: Callable[[float], Sequence[float]], samples: int,
                   t0: float = 0.0, t1: float = 1.0) -> "Curve":
        return cls([fn(s) for s in np.linspace(t0, t1, samples + 1)])

    @classmethod
    def rectangle(cls, center, sides, axes: tuple[int, int]) -> "Curve":
        """Closed rectangle traversed along ``axes[0]`` first, then ``axes[1]``."""
        center = np.asarray(center, dtype=float)
        mu, nu = axes
        a = np.zeros_like(center)
        b = np.zeros_like(center)
        a[mu], b[nu] = sides[0], sides[1]
        corner = center - 0.5 * a - 0.5 * b
        return cls([corner, corner + a, corner + a + b, corner + b, corner])

    @property
    def closed(self) -> bool:
        return self.points.shape[0] > 2 and np.array_equal(self.points[0], self.points[-1])

    @property
    def segments(self) -> int:
        return self.points.shape[0] - 1

    def reversed(self) -> "Curve":
        return Curve(self.points[::-1])

    def then(self, other: "Curve") -> "Curve":
        if not np.allclose(self.points[-1], other.points[0], rtol=0, atol=1e-14):
            raise ValueError("curves do not join")
        return Curve(np.vstack([self.points, other.points[1:]]))


@dataclass(frozen=True, eq=False)
class TransportResult:
    operator: OperatorMatrix
    steps_per_segment: int
    error_estimate: float
    unitarity_defect: float


def _segment_factors(omega: OpOneForm, start, end, steps: int, index: int):
    # identical commuting factors collapse to one exponential of the whole step
    if omega.is_constant:
        steps = 1
    delta = (np.asarray(end) - np.asarray(start)) / steps
    for k in range(steps):
        mid = np.asarray(start) + (k + 0.5) * delta
        gen = omega.contract(mid, delta).toarray()
        with np.errstate(over="ignore"):
            factor = scipy.linalg.expm(-gen)
        if not np.all(np.isfinite(factor)):
            raise TransportError(f"matrix exponential overflowed on segment {index}, substep {k}")
        yield factor


def _product(omega: OpOneForm, curve: Curve, steps: int) -> np.ndarray:
    size = omega.components[0](curve.points[0]).size
    total = np.eye(size, dtype=complex)
    for i in range(curve.segments):
        for factor in _segment_factors(omega, curve.points[i], curve.points[i + 1], steps, i):
            # later pieces of the path act on the left
            total = factor @ total
    return total


def ordered_exponential(omega: OpOneForm, curve: Curve, steps: int = 1,
                        estimate_error: bool = True) -> TransportResult:
    """Midpoint product ``prod exp(-omega_mu(mid) dx^mu)`` over the curve.

    The error estimate is ``(4/3) |U_n - U_2n|``, the Richardson estimate of the
    error in the returned ``n``-step product for a second-order rule.  It is
    zero without extra work when every component is base-constant, since the
    rule is then exact.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    total = _product(omega, curve, steps)
    error = 0.0
    if estimate_error and not omega.is_constant and curve.segments:
        error = 4.0 * max_abs(total - _product(omega, curve, 2 * steps)) / 3.0
    op = OperatorMatrix(total)
    return TransportResult(op, steps, error, unitarity_error(op))


def _time_shift(omega: OpOneForm, curve: Curve) -> float:
    if "t" not in omega.chart.names:
        return 0.0
    i = omega.chart.index("t")
    return float(curve.points[-1][i] - curve.points[0][i])


def transport_state(omega: OpOneForm, curve: Curve, state: WaveState, steps: int = 1) -> WaveState:
    """``psi(end) = Pexp(-int omega) psi(start)``; the time tag advances with ``t``."""
    result = ordered_exponential(omega, curve, steps, estimate_error=False)
    if result.operator.size != state.grid.size:
        raise GridMismatchError("connection and state act on different grids")
    return WaveState(result.operator.matrix @ state.amplitudes, state.grid,
                     state.time + _time_shift(omega, curve))


@dataclass(frozen=True, eq=False)
class HolonomyReport:
    operator: OperatorMatrix
    predicted: OperatorMatrix
    defect: float
    loop_phase: Optional[float]
    predicted_phase: Optional[float]
    area: float


def holonomy(omega: OpOneForm, center, sides, axes: tuple[int, int] = (1, 0), steps: int = 1,
             state: WaveState | None = None) -> HolonomyReport:
    """Transport around a small rectangle and compare with ``exp(-Omega area)``.

    The loop runs along ``axes[0]`` first, so with the default ``(x, t)`` ordering
    of a ``(t, x)`` chart the prediction uses ``Omega_{xt}``.  With a test
    ``state`` the defect is ``|(U_loop - exp(-Omega area)) psi|`` and the loop
    phase ``arg <psi|U_loop|psi>`` is compared with ``-<psi|F|psi> area``;
    otherwise the defect is the largest matrix entry of the difference.
    """
    mu, nu = axes
    center = np.asarray(center, dtype=float)
    loop = Curve.rectangle(center, sides, axes)
    u_loop = ordered_exponential(omega, loop, steps, estimate_error=False).operator
    area = float(sides[0] * sides[1])
    curv = curvature(omega)
    omega_mn = curv.two_form.component(mu, nu, center)
    predicted = OperatorMatrix(scipy.linalg.expm(-area * omega_mn.toarray()))
    diff = u_loop.matrix - predicted.matrix
    if state is None:
        return HolonomyReport(u_loop, predicted, max_abs(diff), None, None, area)
    if u_loop.size != state.grid.size:
        raise GridMismatchError("connection and state act on different grids")
    psi = state.amplitudes
    w = state.grid.cell
    defect = float(np.sqrt(w * np.sum(np.abs(diff @ psi) ** 2)))
    phase = float(np.angle(w * np.vdot(psi, u_loop.matrix @ psi)))
    f_mn = curv.field_strength.component(mu, nu, center)
    f_mean = (w * np.vdot(psi, f_mn.matrix @ psi)).real / state.norm() ** 2
    return HolonomyReport(u_loop, predicted, defect, phase, float(-f_mean * area), area)

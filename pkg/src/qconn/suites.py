"""Curvature and holonomy measurements for one-dimensional potentials.

For ``omega = i H dt - i P dx`` on the ``(t, x)`` chart the curvature component
``Omega_xt = [P, H]`` should act as ``-i V'(x)`` on smooth states.  The suite
measures that error under grid refinement and the holonomy of shrinking loops.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .forms import BaseChart, OperatorField, action_connection, curvature
from .grid import GridSpec, build_hamiltonian, build_momentum, gaussian_packet
from .transport import holonomy

POTENTIALS = ("free", "linear", "harmonic", "quartic")


@dataclass(frozen=True)
class Potential:
    name: str
    value: Callable[[np.ndarray], np.ndarray]
    slope: Callable[[np.ndarray], np.ndarray]


def named_potential(name: str, m: float = 1.0, g: float = 1.0, k: float = 1.0,
                    lam: float = 0.1) -> Potential:
    """``free: 0``, ``linear: m g x``, ``harmonic: k x^2/2``, ``quartic: lam x^4/4``."""
    if name == "free":
        return Potential(name, lambda x: np.zeros_like(x), lambda x: np.zeros_like(x))
    if name == "linear":
        return Potential(name, lambda x: m * g * x, lambda x: np.full_like(x, m * g))
    if name == "harmonic":
        return Potential(name, lambda x: 0.5 * k * x**2, lambda x: k * x)
    if name == "quartic":
        return Potential(name, lambda x: 0.25 * lam * x**4, lambda x: lam * x**3)
    raise ValueError(f"unknown potential {name!r}; choose one of {', '.join(POTENTIALS)}")


def potential_connection(grid: GridSpec, m: float, potential: Potential):
    chart = BaseChart(("t", "x"))
    ham = OperatorField.constant_operator(build_hamiltonian(grid, m, potential.value), 2)
    mom = OperatorField.constant_operator(build_momentum(grid), 2)
    return action_connection(chart, ham, [mom])


@dataclass(frozen=True)
class CurvatureRow:
    n: int
    h: float
    error: float
    order: float
    mean_field_strength: float
    expected_field_strength: float


@dataclass(frozen=True)
class HolonomyRow:
    delta: float
    defect: float
    order: float
    phase: float
    predicted_phase: float


@dataclass(frozen=True)
class CurvatureSuite:
    potential: str
    curvature: tuple[CurvatureRow, ...]
    holonomy: tuple[HolonomyRow, ...]

    @property
    def spatial_order(self) -> float:
        return self.curvature[-1].order

    @property
    def defect_order(self) -> float:
        return min(r.order for r in self.holonomy[1:]) if len(self.holonomy) > 1 else float("nan")


def _order(prev: float, cur: float, ratio: float) -> float:
    if prev == 0 or cur == 0:
        return float("inf") if prev == cur == 0 else float("nan")
    return float(np.log(prev / cur) / np.log(ratio))


def curvature_suite(name: str = "linear", m: float = 1.0, g: float = 2.0, k: float = 1.0,
                    lam: float = 0.1, length: float = 20.0, ns: Sequence[int] = (64, 128, 256),
                    center: float = 1.0, width: float = 1.0, holonomy_n: int = 128,
                    deltas: Sequence[float] = (0.1, 0.05, 0.025)) -> CurvatureSuite:
    """Curvature error ``|(Omega_xt + i V') psi|`` for a Gaussian ``psi`` on grids of
    ``ns`` points, and holonomy defects for square loops of side ``deltas``.

    ``mean_field_strength`` is ``<psi|F_tx|psi>``, which approaches ``<V'>``.
    """
    pot = named_potential(name, m, g, k, lam)
    rows = []
    prev = None
    for n in ns:
        grid = GridSpec(length, n)
        psi = gaussian_packet(grid, center, 0.0, width)
        omega = potential_connection(grid, m, pot)
        curv = curvature(omega)
        origin = np.zeros(2)
        omega_xt = curv.two_form.component(1, 0, origin)
        target = -1j * pot.slope(grid.x) * psi.amplitudes
        err = float(np.sqrt(grid.cell) * np.linalg.norm(omega_xt.matrix @ psi.amplitudes - target))
        f_tx = curv.field_strength.component(0, 1, origin)
        mean = float((grid.cell * np.vdot(psi.amplitudes, f_tx.matrix @ psi.amplitudes)).real)
        expected = float(grid.cell * np.sum(np.abs(psi.amplitudes) ** 2 * pot.slope(grid.x)))
        order = float("nan") if prev is None else _order(prev[1], err, prev[0] / grid.h)
        rows.append(CurvatureRow(n, grid.h, err, order, mean, expected))
        prev = (grid.h, err)

    grid = GridSpec(length, holonomy_n)
    psi = gaussian_packet(grid, center, 0.0, width)
    omega = potential_connection(grid, m, pot)
    hol = []
    prev = None
    for delta in deltas:
        rep = holonomy(omega, (0.0, 0.0), (delta, delta), axes=(1, 0), state=psi)
        order = float("nan") if prev is None else _order(prev[1], rep.defect, prev[0] / delta)
        hol.append(HolonomyRow(delta, rep.defect, order, rep.loop_phase, rep.predicted_phase))
        prev = (delta, rep.defect)
    return CurvatureSuite(name, tuple(rows), tuple(hol))

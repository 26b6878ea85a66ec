"""Changes of reference frame and their numerical covariance checks.

A :class:`FrameTransform` bundles a coordinate map, the momentum substitution,
the frame Hamiltonian and the exact phase ``phi(t', x')`` relating the two
descriptions, ``psi(x, t) = exp(i phi(t', x')) psi'(x', t')``.
:func:`verify_covariance` evolves a state in both frames with Crank-Nicolson
and measures how well that relation holds on the grid.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import mpmath
import numpy as np

from .errors import DomainError
from .grid import (
    PERIODIC,
    GridSpec,
    HamiltonianLike,
    OperatorMatrix,
    WaveState,
    boundary_weight,
    build_momentum,
    evolve,
    fourier_interpolate,
    kinetic,
    position,
    potential_operator,
    resample,
)
from .symbolic import identities as ids
from .symbolic.poly import Poly

Coords = tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class FrameTransform:
    """Change of frame ``(t, x) -> (t', x')`` with ``t' = t``.

    ``to_frame``/``to_lab`` map a time and a tuple of coordinate arrays.
    ``phase`` evaluates ``phi(t', x')`` in closed form and ``phase_poly`` holds the
    same function as an exact polynomial in the parameter symbols.
    ``pseudo_potential(t', x')`` is the extra potential seen in the frame and
    ``hamiltonians(grid)`` returns the frame kinetic-plus-inertial operators by name.
    """

    name: str
    params: dict
    dimension: int
    to_frame: Callable[[float, Coords], Coords]
    to_lab: Callable[[float, Coords], Coords]
    momentum_rule: Callable[[float, np.ndarray], np.ndarray]
    phase: Callable[[float, Coords], np.ndarray]
    phase_poly: Poly
    hamiltonians: Callable[[GridSpec], dict]
    default_form: str = "phase"

    @property
    def mass(self) -> float:
        return self.params["m"]

    @property
    def is_identity(self) -> bool:
        return all(v == 0 for k, v in self.params.items() if k != "m")

    def phase_from_poly(self, t: float, coords: Sequence[float]) -> float:
        """Evaluate ``phase_poly`` at a point (exact rational arithmetic when the
        inputs are rational)."""
        values = {k: Fraction(v) for k, v in self.params.items()}
        names = ["x'", "y'"][: self.dimension] if self.dimension > 1 else ["x'"]
        values.update({n: Fraction(c) for n, c in zip(names, coords)})
        values["t'"] = Fraction(t)
        return float(self.phase_poly.evaluate(values))

    def frame_hamiltonian(self, grid: GridSpec, form: str | None = None,
                          lab_potential: Callable | None = None) -> HamiltonianLike:
        """Frame Hamiltonian on ``grid``; time dependent when a lab potential is
        carried along the moving frame."""
        base = self.hamiltonians(grid)[form or self.default_form]
        if lab_potential is None:
            return base

        def at(t: float) -> OperatorMatrix:
            lab_coords = self.to_lab(t, grid.coordinates())
            return OperatorMatrix.checked((base + potential_operator(grid, lab_potential(*lab_coords))).matrix)

        return at


def _check_mass(m: float):
    if not m > 0:
        raise ValueError(f"mass must be positive, got {m}")


def galilean_boost(m: float, v: float) -> FrameTransform:
    """Frame moving with velocity ``v``: ``x' = x - v t``, ``p' = p - m v`` and
    ``phi = m v x' + m v^2 t'/2``."""
    _check_mass(m)

    def hamiltonians(grid):
        return {"phase": kinetic(grid, m),
                "raw": OperatorMatrix.checked((kinetic(grid, m) - build_momentum(grid) * v).matrix)}

    return FrameTransform(
        name="boost",
        params={"m": m, "v": v},
        dimension=1,
        to_frame=lambda t, xs: (xs[0] - v * t,),
        to_lab=lambda t, xs: (xs[0] + v * t,),
        momentum_rule=lambda t, p: p - m * v,
        phase=lambda t, xs: m * v * xs[0] + 0.5 * m * v**2 * t,
        phase_poly=ids.boost_phase(),
        hamiltonians=hamiltonians,
    )


def uniform_acceleration(m: float, g: float) -> FrameTransform:
    """Frame accelerating with ``g``: ``x' = x - g t^2/2``, ``p' = p - m g t'``,
    pseudo-potential ``m g x'`` and ``phi = m g (t' x' + g t'^3/6)``.

    The ``"raw"`` Hamiltonian ``p^2/2m - g t' p`` is the frame generator before
    the momentum shift; it needs no phase and is time dependent.
    """
    _check_mass(m)

    def hamiltonians(grid):
        k = kinetic(grid, m)
        p = build_momentum(grid)
        return {
            "phase": OperatorMatrix.checked((k + potential_operator(grid, m * g * grid.x)).matrix),
            "raw": lambda t: OperatorMatrix.checked((k - p * (g * t)).matrix),
        }

    return FrameTransform(
        name="accel",
        params={"m": m, "g": g},
        dimension=1,
        to_frame=lambda t, xs: (xs[0] - 0.5 * g * t**2,),
        to_lab=lambda t, xs: (xs[0] + 0.5 * g * t**2,),
        momentum_rule=lambda t, p: p - m * g * t,
        phase=lambda t, xs: m * g * (t * xs[0] + g * t**3 / 6.0),
        phase_poly=ids.acceleration_phase(),
        hamiltonians=hamiltonians,
    )


def _rotate(angle: float, a, b):
    c, s = np.cos(angle), np.sin(angle)
    return c * a + s * b, -s * a + c * b


def angular_momentum(grid: GridSpec) -> OperatorMatrix:
    """Symmetrised ``J = (X Py + Py X)/2 - (Y Px + Px Y)/2`` on a 2-D grid."""
    if grid.dimension != 2:
        raise ValueError("angular momentum needs a 2-D grid")
    px, py = build_momentum(grid, 0), build_momentum(grid, 1)
    x, y = position(grid, 0), position(grid, 1)
    j = 0.5 * ((x @ py) + (py @ x)) - 0.5 * ((y @ px) + (px @ y))
    return OperatorMatrix.checked(j.matrix)


def rotation_hamiltonians(grid: GridSpec, m: float, w: float) -> dict:
    """Both forms of the rotating-frame Hamiltonian.

    ``"angular"``: ``P^2/2m - w J``.
    ``"coriolis"``: ``(Px + m w Y)^2/2m + (Py - m w X)^2/2m - m w^2 (X^2 + Y^2)/2``.
    """
    _check_mass(m)
    px, py = build_momentum(grid, 0), build_momentum(grid, 1)
    x, y = position(grid, 0), position(grid, 1)
    angular = kinetic(grid, m) - angular_momentum(grid) * w
    sx = px + y * (m * w)
    sy = py - x * (m * w)
    coriolis = (sx @ sx + sy @ sy) / (2 * m) - ((x @ x) + (y @ y)) * (0.5 * m * w**2)
    return {"angular": OperatorMatrix.checked(angular.matrix),
            "coriolis": OperatorMatrix.checked(coriolis.matrix)}


def uniform_rotation(m: float, w: float) -> FrameTransform:
    """Frame rotating with angular velocity ``w`` in the plane:
    ``x' = x cos wt + y sin wt``, ``y' = -x sin wt + y cos wt``, ``p' = R p``.
    No phase is generated."""
    _check_mass(m)
    return FrameTransform(
        name="rotate",
        params={"m": m, "w": w},
        dimension=2,
        to_frame=lambda t, xs: _rotate(w * t, xs[0], xs[1]),
        to_lab=lambda t, xs: _rotate(-w * t, xs[0], xs[1]),
        momentum_rule=lambda t, p: np.array(_rotate(w * t, p[0], p[1])),
        phase=lambda t, xs: np.zeros_like(np.asarray(xs[0], dtype=float)),
        phase_poly=Poly(),
        hamiltonians=lambda grid: rotation_hamiltonians(grid, m, w),
        default_form="angular",
    )


@dataclass(frozen=True)
class CompositionReport:
    sum_route: float
    combined: float
    correction: float
    residual_poly: Poly
    potential_residual: object


def compose_accelerations(m: float, g: float, g2: float, x2: float = 1.0, t2: float = 1.0):
    """Two successive accelerations ``g`` then ``g2`` along one axis.

    Returns ``(uniform_acceleration(m, g + g2), report)``.  The report evaluates
    ``phi_g(x', t') + phi_g2(x'', t'') - m g g2 t''^3/6`` and ``phi_{g+g2}(x'', t'')``
    at ``(x'', t'') = (x2, t2)`` and carries the symbolic residuals.
    """
    first, second = uniform_acceleration(m, g), uniform_acceleration(m, g2)
    combined = uniform_acceleration(m, g + g2)
    x1 = x2 + 0.5 * g2 * t2**2
    correction = m * g * g2 * t2**3 / 6.0
    sum_route = float(first.phase(t2, (x1,)) + second.phase(t2, (x2,)) - correction)
    report = CompositionReport(
        sum_route=sum_route,
        combined=float(combined.phase(t2, (x2,))),
        correction=correction,
        residual_poly=ids.verify_acceleration_composition(),
        potential_residual=ids.verify_composition_potential(),
    )
    return combined, report


# -- covariance harness ------------------------------------------------------


@dataclass(frozen=True)
class RefinementRow:
    kind: str
    value: float
    discrepancy: float
    reduction: float
    order: float


@dataclass(frozen=True)
class CovarianceReport:
    transform: str
    params: dict
    grid: dict
    dt: float
    T: float
    form: str
    discrepancy: float
    table: tuple[RefinementRow, ...] = ()
    temporal_order: Optional[float] = None
    boundary_weight: float = 0.0

    def rows(self, kind: str) -> list[RefinementRow]:
        return [r for r in self.table if r.kind == kind]


def _workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("QCONN_THREADS")
    return max(1, int(env)) if env else 1


def _run_frames(transform: FrameTransform, initial: WaveState, T: float, dt: float,
                form: str | None, lab_potential, boundary_tol: float):
    grid = initial.grid
    if grid.boundary != PERIODIC:
        raise ValueError("covariance checks need a periodic grid")
    if grid.dimension != transform.dimension:
        raise ValueError(f"{transform.name} acts on {transform.dimension}-D grids")
    steps = int(round(T / dt))
    if steps < 1 or abs(steps * dt - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"T={T} is not a whole number of steps of dt={dt}")
    m = transform.mass
    coords = grid.coordinates()
    h_lab = OperatorMatrix.checked(kinetic(grid, m).matrix) if lab_potential is None else \
        OperatorMatrix.checked((kinetic(grid, m) + potential_operator(grid, lab_potential)).matrix)

    form = form or transform.default_form
    use_phase = form != "raw"

    def phase(t, xs):
        return transform.phase(t, xs) if use_phase else 0.0

    t0 = initial.time
    lab_points = transform.to_lab(t0, coords)
    frame0 = np.exp(-1j * phase(t0, coords)) * fourier_interpolate(initial, lab_points)
    frame_initial = WaveState(frame0, grid, t0)

    lab = evolve(h_lab, initial, dt, steps)
    frame = evolve(transform.frame_hamiltonian(grid, form, lab_potential), frame_initial, dt, steps)

    weight = max(boundary_weight(lab), boundary_weight(frame))
    if weight > boundary_tol:
        raise DomainError(
            f"packet reached the grid boundary (weight {weight:.2e} in the outer 5%); "
            "enlarge the grid or shorten T"
        )

    t1 = lab.time
    primed = transform.to_frame(t1, coords)
    mapped = np.exp(1j * phase(t1, primed)) * fourier_interpolate(frame, primed)
    overlap = np.vdot(mapped, lab.amplitudes)
    if abs(overlap) > 0:
        mapped = mapped * (overlap / abs(overlap))
    residual = lab.amplitudes - mapped
    disc = float(np.sqrt(grid.cell * np.vdot(residual, residual).real))
    return disc, residual, weight


def verify_covariance(transform: FrameTransform, initial: WaveState, T: float, dt: float = 1e-3,
                      form: str | None = None, lab_potential=None,
                      refine: Sequence[str] = ("dt",), workers: int | None = None,
                      boundary_tol: float = 1e-5) -> CovarianceReport:
    """Compare lab evolution with frame evolution mapped back through the phase.

    The lab state is evolved under ``P^2/2m (+ V)``.  The frame state starts as
    ``exp(-i phi) psi`` and is evolved under the frame Hamiltonian ``form``.  At
    time ``T`` the frame state is sampled at ``x'(x, T)`` by trigonometric
    interpolation, multiplied by ``exp(i phi)``, aligned to the lab state by the
    single best global phase, and the L2 distance is reported.

    ``refine`` may contain ``"dt"`` (repeat at ``dt/2``), ``"h"`` (repeat on a grid
    with twice the points) and ``"richardson"`` (temporal order from
    ``|R(dt) - R(dt/2)| / |R(dt/2) - R(dt/4)|`` of the residual vectors, which
    isolates the time-stepping error from the fixed spatial error).
    """
    grid = initial.grid
    jobs = [("base", initial, dt)]
    if "dt" in refine or "richardson" in refine:
        jobs.append(("dt", initial, dt / 2))
    if "richardson" in refine:
        jobs.append(("dt4", initial, dt / 4))
    if "h" in refine:
        jobs.append(("h", resample(initial, grid.refined(2)), dt))

    def run(job):
        _, state, step = job
        return _run_frames(transform, state, T, step, form, lab_potential, boundary_tol)

    with ThreadPoolExecutor(max_workers=_workers(workers)) as pool:
        results = dict(zip([j[0] for j in jobs], pool.map(run, jobs)))

    base_disc, base_res, weight = results["base"]
    table = []
    temporal = None
    if "dt" in results:
        d2 = results["dt"][0]
        red = base_disc / d2 if d2 > 0 else float("inf")
        table.append(RefinementRow("dt", dt, base_disc, float("nan"), float("nan")))
        table.append(RefinementRow("dt", dt / 2, d2, red, float(np.log2(red))))
    if "dt4" in results:
        r1, r2, r4 = base_res, results["dt"][1], results["dt4"][1]
        num, den = np.linalg.norm(r1 - r2), np.linalg.norm(r2 - r4)
        temporal = float(np.log2(num / den)) if den > 0 else float("inf")
    if "h" in results:
        dh = results["h"][0]
        red = base_disc / dh if dh > 0 else float("inf")
        table.append(RefinementRow("h", grid.h, base_disc, float("nan"), float("nan")))
        table.append(RefinementRow("h", grid.h / 2, dh, red, float(np.log2(red))))

    return CovarianceReport(
        transform=transform.name,
        params=dict(transform.params),
        grid={"length": grid.length, "n": grid.n, "dimension": grid.dimension},
        dt=dt,
        T=T,
        form=form or transform.default_form,
        discrepancy=base_disc,
        table=tuple(table),
        temporal_order=temporal,
        boundary_weight=weight,
    )


# -- relativistic limit ------------------------------------------------------


@dataclass(frozen=True)
class ScalingReport:
    cs: tuple[float, ...]
    residuals: tuple[float, ...]
    slope: float
    monotone: bool
    sample: dict = field(default_factory=dict)


def _check_small(m, g, t, x, p, c):
    ratios = {"g t/c": abs(g * t) / c, "g x'/c^2": abs(g * x) / c**2, "p/(m c)": abs(p) / (m * c)}
    bad = {k: v for k, v in ratios.items() if v >= 0.1}
    if bad:
        raise DomainError(f"sample violates smallness at c={c:g}: " +
                          ", ".join(f"{k} = {v:.3g}" for k, v in bad.items()))


def rindler_components(m, g, t, x, p, c, dps: int = 50):
    """Exact ``(dt, dx')`` components of ``P_tau dtau + P_A dA`` and of the
    non-relativistic target at one sample, in ``dps``-digit arithmetic.

    With ``s = c t g / (c^2 + g x')`` (so ``tau = asinh s``), ``P0 = sqrt(m^2 c^4 + p^2 c^2)``
    and ``P1 = -p c``.  The factor ``A`` of ``P_tau`` cancels against
    ``dtau/dt = c / (A sqrt(1 + s^2))`` so ``g = 0`` is allowed.
    """
    with mpmath.workdps(dps):
        m, g, t, x, p, c = (mpmath.mpf(v) for v in (m, g, t, x, p, c))
        s = c * t * g / (c**2 + g * x)
        root = mpmath.sqrt(1 + s**2)
        p0 = mpmath.sqrt(m**2 * c**4 + p**2 * c**2)
        p1 = -p * c
        along = p0 * root + p1 * s  # P_tau / A
        exact_dt = c * along / root
        exact_dx = -along * s / root + p0 * s + p1 * root
        kin = p - m * g * t
        target_dt = c * (m * c**2 + kin**2 / (2 * m) + m * g * x) - c * m * g * (x + g * t**2 / 2)
        target_dx = -kin * c - c * m * g * t
        return (exact_dt, exact_dx), (target_dt, target_dx)


def rindler_residual(m, g, t, x, p, c, dps: int = 50) -> float:
    (edt, edx), (tdt, tdx) = rindler_components(m, g, t, x, p, c, dps)
    with mpmath.workdps(dps):
        return float(abs(edt - tdt) + abs(edx - tdx))


def rindler_limit_scaling(m: float = 1.0, g: float = 1.0, t: float = 0.1, x: float = 0.2,
                          p: float = 0.3, cs: Sequence[float] = (1e2, 1e3, 1e4),
                          dps: int = 50) -> ScalingReport:
    """Residual between the exact relativistic one-form and the non-relativistic
    accelerated-frame action as ``c`` grows, with the least-squares log-log slope."""
    cs = tuple(float(c) for c in cs)
    if any(b <= a for a, b in zip(cs, cs[1:])):
        raise ValueError("c values must increase")
    for c in cs:
        _check_small(m, g, t, x, p, c)
    res = tuple(rindler_residual(m, g, t, x, p, c, dps) for c in cs)
    if all(r > 0 for r in res) and len(cs) > 1:
        slope = float(np.polyfit(np.log(cs), np.log(res), 1)[0])
    else:
        slope = float("-inf")
    monotone = all(b < a for a, b in zip(res, res[1:])) or all(r == 0 for r in res)
    return ScalingReport(cs, res, slope, monotone, {"m": m, "g": g, "t": t, "x'": x, "p": p})

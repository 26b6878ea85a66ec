"""Operator-valued differential forms on a coordinate chart of spacetime.

Fields are sampled lazily: an :class:`OperatorField` is a map from a base point to
an :class:`~qconn.grid.OperatorMatrix`, and forms built from fields stay lazy.
Base-point derivatives use analytic partials when supplied, are exactly zero for
fields flagged constant, and fall back to central differences with the chart's
step otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .conventions import CONNECTION_FACTOR, SPATIAL_GENERATOR_SIGN
from .errors import NonUnitaryError
from .grid import OperatorMatrix, commutator, max_abs

UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class BaseChart:
    names: tuple[str, ...]
    steps: tuple[float, ...] = ()

    def __post_init__(self):
        names = tuple(self.names)
        if len(set(names)) != len(names):
            raise ValueError(f"coordinate names must be unique: {names}")
        if not 1 <= len(names) <= 3:
            raise ValueError("charts have one to three coordinates")
        steps = tuple(float(s) for s in self.steps) or (1e-3,) * len(names)
        if len(steps) == 1 and len(names) > 1:
            steps = steps * len(names)
        if len(steps) != len(names) or any(not s > 0 for s in steps):
            raise ValueError(f"need one positive step per coordinate, got {steps}")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "steps", steps)

    @property
    def dimension(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def with_steps(self, step) -> "BaseChart":
        steps = (step,) * self.dimension if np.isscalar(step) else tuple(step)
        return replace(self, steps=steps)


def _point(point) -> np.ndarray:
    return np.atleast_1d(np.asarray(point, dtype=float))


@dataclass(frozen=True, eq=False)
class OperatorField:
    """Base-point dependent operator.

    ``evaluate(point)`` returns an OperatorMatrix.  ``partials[mu]``, when given,
    returns the analytic derivative along coordinate ``mu``.  ``constant[mu]``
    declares the field independent of coordinate ``mu``.
    """

    evaluate: Callable[[np.ndarray], OperatorMatrix]
    dimension: int
    partials: Optional[tuple[Optional[Callable[[np.ndarray], OperatorMatrix]], ...]] = None
    constant: tuple[bool, ...] = ()

    def __post_init__(self):
        if not self.constant:
            object.__setattr__(self, "constant", (False,) * self.dimension)
        if len(self.constant) != self.dimension:
            raise ValueError("one constancy flag per coordinate")
        if self.partials is not None and len(self.partials) != self.dimension:
            raise ValueError("one partial (or None) per coordinate")

    @classmethod
    def constant_operator(cls, op: OperatorMatrix, dimension: int) -> "OperatorField":
        return cls(lambda point, op=op: op, dimension, constant=(True,) * dimension)

    @property
    def is_constant(self) -> bool:
        return all(self.constant)

    def __call__(self, point) -> OperatorMatrix:
        return self.evaluate(_point(point))

    def partial(self, mu: int, point, step: float) -> OperatorMatrix:
        point = _point(point)
        if self.constant[mu]:
            return OperatorMatrix.zeros(self(point).size)
        if self.partials is not None and self.partials[mu] is not None:
            return self.partials[mu](point)
        shift = np.zeros_like(point)
        shift[mu] = step
        return (self.evaluate(point + shift) - self.evaluate(point - shift)) / (2.0 * step)

    def scaled(self, factor: complex) -> "OperatorField":
        partials = None
        if self.partials is not None:
            partials = tuple(None if d is None else (lambda p, d=d: d(p) * factor) for d in self.partials)
        return OperatorField(lambda p: self.evaluate(p) * factor, self.dimension, partials, self.constant)


def field_sum(a: OperatorField, b: OperatorField) -> OperatorField:
    partials = None
    if a.partials is not None and b.partials is not None:
        partials = tuple(
            None if (da is None or db is None) else (lambda p, da=da, db=db: da(p) + db(p))
            for da, db in zip(a.partials, b.partials)
        )
    constant = tuple(x and y for x, y in zip(a.constant, b.constant))
    return OperatorField(lambda p: a.evaluate(p) + b.evaluate(p), a.dimension, partials, constant)


@dataclass(frozen=True, eq=False)
class OpOneForm:
    """``omega = omega_mu dx^mu`` with one OperatorField per chart coordinate."""

    chart: BaseChart
    components: tuple[OperatorField, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) != self.chart.dimension:
            raise ValueError(
                f"{len(self.components)} components for a {self.chart.dimension}-D chart"
            )

    def at(self, point) -> list[OperatorMatrix]:
        return [c(point) for c in self.components]

    def contract(self, point, tangent) -> OperatorMatrix:
        """``omega_mu(point) * tangent^mu``."""
        total = None
        for comp, v in zip(self.components, np.asarray(tangent, dtype=float)):
            if v == 0.0:
                continue
            term = comp(point) * v
            total = term if total is None else total + term
        if total is None:
            return OperatorMatrix.zeros(self.components[0](point).size)
        return total

    def with_chart(self, chart: BaseChart) -> "OpOneForm":
        return OpOneForm(chart, self.components)

    def __add__(self, other: "OpOneForm") -> "OpOneForm":
        return OpOneForm(self.chart, [field_sum(a, b) for a, b in zip(self.components, other.components)])

    @property
    def is_constant(self) -> bool:
        return all(c.is_constant for c in self.components)


@dataclass(frozen=True, eq=False)
class OpTwoForm:
    """Antisymmetric components ``F[mu, nu]``; only ``mu < nu`` is stored."""

    chart: BaseChart
    upper: dict

    def component(self, mu: int, nu: int, point) -> OperatorMatrix:
        if mu == nu:
            some = next(iter(self.upper.values()))
            return OperatorMatrix.zeros(some(point).size)
        if mu < nu:
            return self.upper[(mu, nu)](point)
        return -self.upper[(nu, mu)](point)

    def full(self, point) -> list[list[OperatorMatrix]]:
        d = self.chart.dimension
        return [[self.component(mu, nu, point) for nu in range(d)] for mu in range(d)]

    def antisymmetry_error(self, point) -> float:
        arr = self.full(point)
        d = self.chart.dimension
        return max(max_abs((arr[a][b] + arr[b][a]).matrix) for a in range(d) for b in range(d))

    def map(self, fn: Callable[[OperatorMatrix, np.ndarray], OperatorMatrix]) -> "OpTwoForm":
        return OpTwoForm(self.chart, {k: (lambda p, f=f: fn(f(p), _point(p))) for k, f in self.upper.items()})


@dataclass(frozen=True, eq=False)
class Curvature:
    """``two_form`` is Omega; ``field_strength`` is F with ``Omega = iF``."""

    two_form: OpTwoForm
    field_strength: OpTwoForm


def action_connection(chart: BaseChart, hamiltonian: OperatorField,
                      momenta: Sequence[OperatorField], probe=None) -> OpOneForm:
    """Connection ``omega = i P_mu dx^mu`` with ``P_mu = (H, -P)`` for a chart
    ordered ``(t, x[, y])``."""
    generators = [hamiltonian] + [m.scaled(SPATIAL_GENERATOR_SIGN) for m in momenta]
    return connection_from_generators(chart, generators, probe)


def connection_from_generators(chart: BaseChart, generators: Sequence[OperatorField],
                               probe=None) -> OpOneForm:
    """``omega_mu = i * generators[mu]``.

    Generators must be hermitian; this is checked at ``probe`` (default: the
    chart origin).
    """
    if len(generators) != chart.dimension:
        raise ValueError(f"need {chart.dimension} generators, got {len(generators)}")
    probe = np.zeros(chart.dimension) if probe is None else _point(probe)
    for mu, g in enumerate(generators):
        err = g(probe).hermiticity_error()
        if err > 1e-12:
            raise ValueError(f"generator {chart.names[mu]} is not hermitian (|A - A^H| = {err:.3e})")
    return OpOneForm(chart, [g.scaled(CONNECTION_FACTOR) for g in generators])


def exterior_derivative(omega: OpOneForm) -> OpTwoForm:
    """``(d omega)[mu, nu] = d_mu omega_nu - d_nu omega_mu``."""
    chart = omega.chart
    comps = omega.components

    def make(mu, nu):
        def value(point):
            return comps[nu].partial(mu, point, chart.steps[mu]) - comps[mu].partial(nu, point, chart.steps[nu])
        return value

    d = chart.dimension
    return OpTwoForm(chart, {(mu, nu): make(mu, nu) for mu in range(d) for nu in range(mu + 1, d)})


def wedge_square(omega: OpOneForm) -> OpTwoForm:
    """``(omega ^ omega)[mu, nu] = [omega_mu, omega_nu]``."""
    comps = omega.components
    d = omega.chart.dimension

    def make(mu, nu):
        return lambda point: commutator(comps[mu](point), comps[nu](point))

    return OpTwoForm(omega.chart, {(mu, nu): make(mu, nu) for mu in range(d) for nu in range(mu + 1, d)})


def curvature(omega: OpOneForm) -> Curvature:
    """``Omega = d omega + omega ^ omega`` together with ``F = -i Omega``."""
    d_omega = exterior_derivative(omega)
    ww = wedge_square(omega)
    two = OpTwoForm(
        omega.chart,
        {k: (lambda p, k=k: d_omega.upper[k](p) + ww.upper[k](p)) for k in d_omega.upper},
    )
    strength = two.map(lambda op, p: op * -1j)
    return Curvature(two, strength)


def unitarity_error(u: OperatorMatrix) -> float:
    m = u.toarray()
    return max_abs(m.conj().T @ m - np.eye(m.shape[0]))


def _checked_unitary(u_field: OperatorField, point) -> OperatorMatrix:
    u = u_field(point)
    err = unitarity_error(u)
    if err > UNITARY_TOL:
        raise NonUnitaryError(f"U is not unitary at {np.asarray(point).tolist()}: |U^H U - 1| = {err:.3e}")
    return u


def gauge_transform(omega: OpOneForm, u_field: OperatorField) -> OpOneForm:
    """``omega'_mu = U omega_mu U^-1 + U d_mu(U^-1)`` with ``U^-1 = U^H``.

    ``d_mu(U^-1)`` is ``(d_mu U)^H``, taken from ``u_field``'s partials or by
    central differences with the chart step.
    """
    chart = omega.chart

    def make(mu):
        comp = omega.components[mu]

        def value(point):
            u = _checked_unitary(u_field, point)
            uinv = u.adjoint()
            du_inv = u_field.partial(mu, point, chart.steps[mu]).adjoint()
            return u @ comp(point) @ uinv + u @ du_inv

        constant = tuple(a and b for a, b in zip(comp.constant, u_field.constant))
        return OperatorField(value, chart.dimension, constant=constant)

    return OpOneForm(chart, [make(mu) for mu in range(chart.dimension)])


@dataclass(frozen=True)
class CovarianceResidual:
    steps: tuple[float, ...]
    residuals: tuple[float, ...]
    orders: tuple[float, ...]

    @property
    def order(self) -> float:
        return self.orders[-1] if self.orders else float("nan")


def _conjugation_residual(omega: OpOneForm, u_field: OperatorField, points) -> float:
    transformed = curvature(gauge_transform(omega, u_field)).two_form
    original = curvature(omega).two_form
    d = omega.chart.dimension
    worst = 0.0
    for point in points:
        u = _checked_unitary(u_field, point)
        for mu in range(d):
            for nu in range(mu + 1, d):
                expected = u @ original.component(mu, nu, point) @ u.adjoint()
                got = transformed.component(mu, nu, point)
                worst = max(worst, max_abs((got - expected).matrix))
    return worst


def curvature_covariance_check(omega: OpOneForm, u_field: OperatorField, points,
                               steps: Sequence[float] | None = None) -> CovarianceResidual:
    """Residual ``max |Omega' - U Omega U^-1|`` over ``points`` for each base step.

    ``steps`` defaults to the chart step followed by two halvings; the measured
    convergence order is ``log2`` of successive residual ratios.
    """
    if steps is None:
        s = omega.chart.steps[0]
        steps = (s, s / 2, s / 4)
    points = [_point(p) for p in points]
    residuals = []
    for s in steps:
        scaled = omega.with_chart(omega.chart.with_steps(s))
        residuals.append(_conjugation_residual(scaled, u_field, points))
    orders = tuple(
        float(np.log(residuals[i] / residuals[i + 1]) / np.log(steps[i] / steps[i + 1]))
        if residuals[i + 1] > 0 and residuals[i] > 0 else float("inf")
        for i in range(len(steps) - 1)
    )
    return CovarianceResidual(tuple(steps), tuple(residuals), orders)

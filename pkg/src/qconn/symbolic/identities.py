"""Exact checks of the frame-change identities of the action connection.

Each ``verify_*`` function rebuilds ``i*omega`` (or ``-i*omega``) in the new
frame from the lab expression and the coordinate map, then subtracts the claimed
decomposition into a new-frame action plus an exact differential.  They return
the residual itself, which is the literal zero object when the identity holds.

Symbols: primed names such as ``x'`` and ``t'`` are the moving-frame coordinates,
``p`` is the lab momentum and ``p'`` the frame momentum; ``w`` is the angular
velocity of a rotating frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import InsufficientOrderError
from .poly import FormExpr, Poly, differential, substitute
from .series import (
    GradedSeries,
    asinh_coefficient,
    compose,
    cosh_coefficient,
    geometric_coefficient,
    sinh_coefficient,
    sqrt1p_coefficient,
)

HALF = Fraction(1, 2)
SIXTH = Fraction(1, 6)

V = Poly.var


def _axes(dimension: int) -> list[str]:
    return [""] if dimension == 1 else [str(i + 1) for i in range(dimension)]


def free_action(dimension: int = 1) -> FormExpr:
    """Lab-frame ``i*omega = p.dx - (p^2/2m) dt`` for a free particle."""
    axes = _axes(dimension)
    m = V("m")
    coords = ["t"] + [f"x{a}" for a in axes]
    coeffs = {f"x{a}": V(f"p{a}") for a in axes}
    coeffs["t"] = -sum((V(f"p{a}") ** 2 for a in axes), Poly()) / (2 * m)
    return FormExpr(coords, coeffs)


# -- Galilean boost --------------------------------------------------------


def boost_phase(dimension: int = 1, include_energy: bool = True) -> Poly:
    """``m v.x' + (1/2) m v^2 t'``."""
    axes = _axes(dimension)
    m = V("m")
    phase = sum((m * V(f"v{a}") * V(f"x{a}'") for a in axes), Poly())
    if include_energy:
        phase = phase + HALF * m * sum((V(f"v{a}") ** 2 for a in axes), Poly()) * V("t'")
    return phase


def verify_boost_identity(dimension: int = 1, wrong_phase: bool = False) -> FormExpr:
    """Residual of ``i*omega = p'.dx' - (p'^2/2m) dt' + d(phase)`` under
    ``x = x' + v t'``, ``t = t'``, ``p = p' + m v``.

    ``wrong_phase`` drops the ``(1/2) m v^2 t'`` term to show the check is
    sensitive; the residual is then ``-(1/2) m v^2 dt'``.
    """
    axes = _axes(dimension)
    m = V("m")
    new_coords = ["t'"] + [f"x{a}'" for a in axes]
    rules = {"t": V("t'")}
    rules.update({f"x{a}": V(f"x{a}'") + V(f"v{a}") * V("t'") for a in axes})
    moved = substitute(free_action(dimension), rules, new_coords)
    moved = substitute(moved, {f"p{a}": V(f"p{a}'") + m * V(f"v{a}") for a in axes}, new_coords)

    claimed_coeffs = {f"x{a}'": V(f"p{a}'") for a in axes}
    claimed_coeffs["t'"] = -sum((V(f"p{a}'") ** 2 for a in axes), Poly()) / (2 * m)
    claimed = FormExpr(new_coords, claimed_coeffs)
    claimed = claimed + differential(boost_phase(dimension, not wrong_phase), new_coords)
    return claimed - moved


# -- uniform acceleration --------------------------------------------------


def acceleration_phase(g: str = "g", x: str = "x'", t: str = "t'") -> Poly:
    """``m g (t x + g t^3/6)``."""
    gg, xx, tt = V(g), V(x), V(t)
    return V("m") * gg * (tt * xx + SIXTH * gg * tt**3)


def acceleration_frame_form() -> FormExpr:
    """``i*omega`` after ``x = x' + g t'^2/2``, ``t = t'``, still in lab momentum:
    ``p dx' + p g t' dt' - (p^2/2m) dt'``."""
    rules = {"x": V("x'") + HALF * V("g") * V("t'") ** 2, "t": V("t'")}
    return substitute(free_action(1), rules, ["t'", "x'"])


def verify_acceleration_identity() -> FormExpr:
    """Residual of ``i*omega = p'dx' - (p'^2/2m + m g x') dt' + d[m g (t'x' + g t'^3/6)]``
    with ``p = p' + m g t'``."""
    m, g = V("m"), V("g")
    coords = ["t'", "x'"]
    moved = substitute(acceleration_frame_form(), {"p": V("p'") + m * g * V("t'")}, coords)
    claimed = FormExpr(coords, {
        "x'": V("p'"),
        "t'": -(V("p'") ** 2 / (2 * m) + m * g * V("x'")),
    }) + differential(acceleration_phase(), coords)
    return claimed - moved


def verify_acceleration_composition() -> Poly:
    """Phase additivity for two accelerations along the same axis.

    ``phase_g(x', t') + phase_g'(x'', t'') - (1/6) m g g' t''^3 - phase_{g+g'}(x'', t'')``
    after ``x' = x'' + g' t''^2/2``, ``t' = t''``.
    """
    m, g, g2, t2 = V("m"), V("g"), V("g'"), V("t''")
    frame_map = {"x'": V("x''") + HALF * g2 * t2**2, "t'": t2}
    first = substitute(acceleration_phase("g", "x'", "t'"), frame_map)
    second = acceleration_phase("g'", "x''", "t''")
    combined = substitute(acceleration_phase("G", "x''", "t''"), {"G": g + g2})
    return first + second - SIXTH * m * g * g2 * t2**3 - combined


def verify_composition_potential() -> FormExpr:
    """Time components of the two pseudo-potentials:
    ``-m g x' dt' - m g' x'' dt'' = -m (g+g') x'' dt'' - d((1/6) m g g' t''^3)``."""
    m, g, g2, t2 = V("m"), V("g"), V("g'"), V("t''")
    coords = ["t''", "x''"]
    first = substitute(FormExpr(["t'", "x'"], {"t'": -m * g * V("x'")}),
                       {"x'": V("x''") + HALF * g2 * t2**2, "t'": t2}, coords)
    lhs = first + FormExpr(coords, {"t''": -m * g2 * V("x''")})
    rhs = FormExpr(coords, {"t''": -m * (g + g2) * V("x''")}) - differential(SIXTH * m * g * g2 * t2**3, coords)
    return lhs - rhs


def composed_phase_sum() -> Poly:
    """``phase_g(x', t') + phase_g'(x'', t'')`` in double-primed variables, i.e.
    ``m (g+g') x'' t'' + (1/6) m t''^3 (g^2 + g'^2 + 3 g g')``."""
    frame_map = {"x'": V("x''") + HALF * V("g'") * V("t''") ** 2, "t'": V("t''")}
    return substitute(acceleration_phase(), frame_map) + acceleration_phase("g'", "x''", "t''")


# -- uniform rotation ------------------------------------------------------


def rotation_angular_form(flip_sign: bool = False) -> Poly:
    """Frame Hamiltonian ``p'^2/2m - w J`` with ``J = x' p'2 - y' p'1``."""
    m, w = V("m"), V("w")
    p1, p2, x, y = V("p'1"), V("p'2"), V("x'"), V("y'")
    j = x * p2 - y * p1
    sign = 1 if flip_sign else -1
    return (p1**2 + p2**2) / (2 * m) + sign * w * j


def rotation_completed_square(literal: bool = False) -> Poly:
    """Coriolis/centrifugal form of the rotating-frame Hamiltonian.

    ``(p'1 + m w y')^2/2m + (p'2 - m w x')^2/2m - (1/2) m w^2 (x'^2 + y'^2)``.
    ``literal=True`` pairs ``p'1`` with ``x'`` and ``p'2`` with ``y'`` instead,
    which does not reproduce ``p'^2/2m - w J``.
    """
    m, w = V("m"), V("w")
    p1, p2, x, y = V("p'1"), V("p'2"), V("x'"), V("y'")
    a, b = (x, y) if literal else (y, x)
    return ((p1 + m * w * a) ** 2 + (p2 - m * w * b) ** 2) / (2 * m) - HALF * m * w**2 * (x**2 + y**2)


def verify_rotation_identity(flip_sign: bool = False, literal: bool = False) -> Poly:
    """``dt'`` coefficient of (completed-square form) minus (``w J`` form) of
    ``i*omega``; zero when the two Hamiltonians agree.  Flipping the sign of the
    ``w J`` term leaves ``2 w J``."""
    return -rotation_completed_square(literal) + rotation_angular_form(flip_sign)


# -- relativistic accelerated frame ----------------------------------------

RINDLER_ASSUMPTIONS = ("p/(m c) << 1", "g t/c << 1", "g x'/c^2 << 1")
RINDLER_COORDS = ("t", "x'")


@dataclass(frozen=True)
class RindlerExpansion:
    computed: FormExpr
    target: FormExpr
    residual: FormExpr
    order: int
    working_order: int

    def leading_dt(self) -> Poly:
        """Highest-power term of the ``dt`` coefficient."""
        coef = self.computed.coefficient("t")
        top = coef.top
        return coef.coefficient(top) * Poly.var("c", top)


def rindler_target() -> FormExpr:
    """``(mc^2 + (p - m g t)^2/2m + m g x') c dt - (p - m g t) c dx'
    - c d[m g (x' t + g t^3/6)]``."""
    c, g, m, p, t, x = (V(s) for s in ("c", "g", "m", "p", "t", "x'"))
    kinetic = p - m * g * t
    form = FormExpr(RINDLER_COORDS, {
        "t": c * (m * c**2 + kinetic**2 / (2 * m) + m * g * x),
        "x'": -kinetic * c,
    })
    phase = m * g * (x * t + SIXTH * g * t**3)
    return form - differential(phase, RINDLER_COORDS) * c


def _graded(poly) -> GradedSeries:
    return GradedSeries(poly, "c", None, RINDLER_ASSUMPTIONS)


def _pullback(working: int, exact_energy: bool) -> FormExpr:
    c, g, m, p, t, x = (V(s) for s in ("c", "g", "m", "p", "t", "x'"))
    a0 = c**2 / g
    # s = ct/(A0 + x') = (g t / c) / (1 + g x'/c^2)
    ratio = compose(geometric_coefficient, _graded(g * x / c**2), working)
    s = _graded(g * t / c) * ratio
    tau = compose(asinh_coefficient, s, working)
    sinh_tau = compose(sinh_coefficient, tau, working)
    cosh_tau = compose(cosh_coefficient, tau, working)
    if exact_energy:
        energy = compose(sqrt1p_coefficient, _graded(p**2 / (m**2 * c**2)), working - 2) * (m * c**2)
    else:
        energy = _graded(m * c**2 + p**2 / (2 * m))
    boost_component = _graded(-p * c)
    a = _graded(a0 + x)
    p_tau = a * (energy * cosh_tau + boost_component * sinh_tau)
    p_a = energy * sinh_tau + boost_component * cosh_tau
    d_tau = differential(tau, RINDLER_COORDS)
    d_a = FormExpr(RINDLER_COORDS, {"x'": _graded(Poly.const(1))})
    return d_tau * p_tau + d_a * p_a


def _known_from(form: FormExpr) -> int:
    orders = [v.order for v in form.coeffs.values() if v.order is not None]
    return max(orders) if orders else -(10**9)


def _truncate_form(form: FormExpr, order: int) -> FormExpr:
    out = {}
    for k, v in form.coeffs.items():
        if not isinstance(v, GradedSeries):
            v = _graded(v)
        out[k] = v.truncate(order) if v.order is None or v.order <= order else v
    return FormExpr(form.coords, out)


def rindler_expand(order: int = 0, exact_energy: bool = False, max_depth: int = 12) -> RindlerExpansion:
    """Expand ``-i*omega = P_tau dtau + P_A dA`` in powers of ``c`` and compare
    with the non-relativistic accelerated-frame action.

    The chart is ``(t, x')`` with ``tau = asinh(ct/(A0 + x'))``, ``A = A0 + x'`` and
    ``A0 = c^2/g``.  Components are ``P_tau = A (P0 cosh tau + P1 sinh tau)`` and
    ``P_A = P0 sinh tau + P1 cosh tau`` with ``P1 = -p c`` and
    ``P0 = m c^2 + p^2/2m`` (or the full ``sqrt(m^2 c^4 + p^2 c^2)`` expanded, with
    ``exact_energy``).  Everything from ``c**order`` upward is exact; the working
    depth is deepened until that holds.
    """
    target = rindler_target()
    for extra in range(4, 4 + max_depth):
        working = order - extra
        computed = _pullback(working, exact_energy)
        if _known_from(computed) <= order:
            break
    else:
        raise InsufficientOrderError(f"could not reach c^{order} within depth {max_depth}")
    computed = _truncate_form(computed, order)
    residual = _truncate_form(computed - target, order)
    return RindlerExpansion(computed, _truncate_form(target, order), residual, order, working)

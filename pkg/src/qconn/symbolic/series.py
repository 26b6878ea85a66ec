"""Truncated Laurent series in one grading symbol (the speed of light ``c``).

A :class:`GradedSeries` is a Laurent polynomial that is only trusted for powers of
the grading symbol at or above ``order``; lower powers have been discarded.
Every operation propagates ``order`` so that a result never claims more than its
inputs determine: in a product the unknown tail of one factor is lifted by the
highest power present in the other.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, Optional

from ..errors import InsufficientOrderError
from .poly import Poly

EXACT = None


def _known_from(*orders):
    known = [o for o in orders if o is not None]
    return max(known) if known else None


class GradedSeries:
    __slots__ = ("poly", "var", "order", "assumptions")

    def __init__(self, poly, var: str = "c", order: Optional[int] = EXACT,
                 assumptions: tuple[str, ...] = ()):
        poly = Poly.coerce(poly)
        if order is not None:
            poly = Poly({m: k for m, k in poly.terms.items() if dict(m).get(var, 0) >= order})
        self.poly = poly
        self.var = var
        self.order = order
        self.assumptions = tuple(assumptions)

    # helpers ---------------------------------------------------------------

    def _wrap(self, poly, order) -> "GradedSeries":
        return GradedSeries(poly, self.var, order, self.assumptions)

    def _coerce(self, other) -> "GradedSeries":
        if isinstance(other, GradedSeries):
            if other.var != self.var:
                raise ValueError("series graded by different symbols")
            return other
        return GradedSeries(Poly.coerce(other), self.var, EXACT, self.assumptions)

    @property
    def top(self) -> int:
        """Highest power of the grading symbol present (0 for zero)."""
        return self.poly.degree(self.var) if not self.poly.is_zero() else 0

    @property
    def bottom(self) -> int:
        return self.poly.low_degree(self.var)

    def coefficient(self, power: int) -> Poly:
        if self.order is not None and power < self.order:
            raise InsufficientOrderError(
                f"{self.var}^{power} lies below the known order {self.var}^{self.order}"
            )
        return self.poly.coefficient(self.var, power)

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def symbols(self) -> set[str]:
        return self.poly.symbols()

    def truncate(self, order: int) -> "GradedSeries":
        if self.order is not None and order < self.order:
            raise InsufficientOrderError(f"cannot widen a series known from order {self.order} to {order}")
        return self._wrap(self.poly, order)

    # arithmetic ------------------------------------------------------------

    def __add__(self, other) -> "GradedSeries":
        other = self._coerce(other)
        return self._wrap(self.poly + other.poly, _known_from(self.order, other.order))

    __radd__ = __add__

    def __neg__(self) -> "GradedSeries":
        return self._wrap(-self.poly, self.order)

    def __sub__(self, other) -> "GradedSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "GradedSeries":
        return self._coerce(other) - self

    def __mul__(self, other) -> "GradedSeries":
        other = self._coerce(other)
        orders = []
        if self.order is not None:
            orders.append(self.order + (other.top if not other.is_zero() else 0))
        if other.order is not None:
            orders.append(other.order + (self.top if not self.is_zero() else 0))
        order = max(orders) if orders else None
        return self._wrap(self.poly * other.poly, order)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "GradedSeries":
        if power < 0:
            raise ValueError("non-negative powers only")
        result = self._coerce(1)
        for _ in range(power):
            result = result * self
        return result

    def diff(self, name: str) -> "GradedSeries":
        if name == self.var:
            raise ValueError("differentiation along the grading symbol is not graded")
        return self._wrap(self.poly.diff(name), self.order)

    def subs(self, rules) -> "GradedSeries":
        if self.var in rules:
            raise ValueError("cannot substitute the grading symbol")
        return self._wrap(self.poly.subs(rules), self.order)

    def __eq__(self, other) -> bool:
        if isinstance(other, (GradedSeries, Poly, int, Fraction)):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def __str__(self) -> str:
        body = str(self.poly)
        return body if self.order is None else f"{body} + O({self.var}^{self.order - 1})"

    def __repr__(self) -> str:
        return f"GradedSeries({str(self)!r})"


def compose(coefficients: Callable[[int], Fraction], x: GradedSeries, order: int) -> GradedSeries:
    """``sum_n a_n x**n`` known from grading order ``order`` upward.

    ``x`` must be small, i.e. its highest power of the grading symbol negative,
    so the sum can stop once ``x**n`` lies wholly below ``order``.
    """
    if x.order is not None and x.order > order:
        raise InsufficientOrderError(f"argument known only from order {x.order}, need {order}")
    result = x._wrap(Poly.const(coefficients(0)), order)
    if x.is_zero():
        return result
    if x.top >= 0:
        raise ValueError("series composition needs an argument of negative grade")
    power = x._wrap(Poly.const(1), order)
    n = 1
    while n * x.top >= order:
        power = (power * x).truncate(order)
        a = coefficients(n)
        if a:
            result = result + power * a
        n += 1
    return result


def asinh_coefficient(n: int) -> Fraction:
    if n % 2 == 0:
        return Fraction(0)
    k = (n - 1) // 2
    return Fraction((-1) ** k * factorial(2 * k), 4**k * factorial(k) ** 2 * (2 * k + 1))


def sinh_coefficient(n: int) -> Fraction:
    return Fraction(1, factorial(n)) if n % 2 else Fraction(0)


def cosh_coefficient(n: int) -> Fraction:
    return Fraction(0) if n % 2 else Fraction(1, factorial(n))


def sqrt1p_coefficient(n: int) -> Fraction:
    """Taylor coefficients of ``sqrt(1 + u)``."""
    num = Fraction(1)
    for j in range(n):
        num *= Fraction(1, 2) - j
    return num / factorial(n)


def geometric_coefficient(n: int) -> Fraction:
    """Taylor coefficients of ``1 / (1 + u)``."""
    return Fraction((-1) ** n)


def binomial_series(exponent: Fraction) -> Callable[[int], Fraction]:
    def coef(n: int) -> Fraction:
        out = Fraction(1)
        for j in range(n):
            out *= Fraction(exponent) - j
        return out / factorial(n)
    return coef


__all__ = [
    "GradedSeries", "compose", "asinh_coefficient", "sinh_coefficient", "cosh_coefficient",
    "sqrt1p_coefficient", "geometric_coefficient", "binomial_series",
]

"""Exact multivariate (Laurent) polynomials over the rationals, and one-forms
with polynomial coefficients.

Monomials are tuples of ``(symbol, exponent)`` pairs sorted by symbol name with
no zero exponents; negative exponents are allowed so that quantities such as
``c**2 / g`` stay exact.  Coefficients are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import graphlib
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

from ..errors import CyclicSubstitutionError

Monomial = tuple[tuple[str, int], ...]
Scalar = Union[int, Fraction]

ONE: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for name, e in b:
        exps[name] = exps.get(name, 0) + e
    return tuple(sorted((n, e) for n, e in exps.items() if e))


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"exact coefficients only; got {type(value).__name__}")


class Poly:
    """Sparse Laurent polynomial with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean = {}
        for mono, coef in (terms or {}).items():
            coef = _as_fraction(coef)
            if coef:
                clean[mono] = clean.get(mono, 0) + coef
        self.terms: dict[Monomial, Fraction] = {m: c for m, c in clean.items() if c}

    # construction ---------------------------------------------------------

    @classmethod
    def const(cls, value: Scalar) -> "Poly":
        return cls({ONE: value})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "Poly":
        return cls({((name, power),): 1}) if power else cls.const(1)

    @classmethod
    def coerce(cls, value) -> "Poly":
        if isinstance(value, Poly):
            return value
        return cls.const(value)

    # queries ----------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def symbols(self) -> set[str]:
        return {name for mono in self.terms for name, _ in mono}

    def degree(self, name: str) -> int:
        """Largest exponent of ``name`` (0 for the zero polynomial)."""
        return max((dict(m).get(name, 0) for m in self.terms), default=0)

    def low_degree(self, name: str) -> int:
        return min((dict(m).get(name, 0) for m in self.terms), default=0)

    def coefficient(self, name: str, power: int) -> "Poly":
        """Coefficient of ``name**power`` as a polynomial in the other symbols."""
        out = {}
        for mono, coef in self.terms.items():
            exps = dict(mono)
            if exps.get(name, 0) == power:
                exps.pop(name, None)
                out[tuple(sorted(exps.items()))] = coef
        return Poly(out)

    def constant_term(self) -> Fraction:
        return self.terms.get(ONE, Fraction(0))

    # arithmetic -------------------------------------------------------------

    def __add__(self, other) -> "Poly":
        other = Poly.coerce(other)
        out = dict(self.terms)
        for mono, coef in other.terms.items():
            out[mono] = out.get(mono, 0) + coef
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-Poly.coerce(other))

    def __rsub__(self, other) -> "Poly":
        return Poly.coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            try:
                factor = _as_fraction(other)
            except TypeError:
                return NotImplemented
            return Poly({m: c * factor for m, c in self.terms.items()})
        out: dict[Monomial, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                mono = _mono_mul(ma, mb)
                out[mono] = out.get(mono, 0) + ca * cb
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly":
        if isinstance(other, Poly):
            if len(other.terms) != 1:
                raise ZeroDivisionError("only division by a single monomial is exact")
            (mono, coef), = other.terms.items()
            inv = Poly({tuple((n, -e) for n, e in mono): 1 / coef})
            return self * inv
        return self * (1 / _as_fraction(other))

    def __pow__(self, power: int) -> "Poly":
        if not isinstance(power, int):
            raise TypeError("integer powers only")
        if power < 0:
            if len(self.terms) != 1:
                raise ZeroDivisionError("negative power of a non-monomial")
            return Poly.const(1) / (self ** -power)
        result, base = Poly.const(1), self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (Poly, int, Fraction)):
            return (self - Poly.coerce(other)).is_zero()
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return not self.is_zero()

    # calculus and substitution ---------------------------------------------

    def diff(self, name: str) -> "Poly":
        out = {}
        for mono, coef in self.terms.items():
            exps = dict(mono)
            e = exps.get(name, 0)
            if not e:
                continue
            exps[name] = e - 1
            out[tuple(sorted((n, k) for n, k in exps.items() if k))] = coef * e
        return Poly(out)

    def subs(self, rules: Mapping[str, object]) -> "Poly":
        """Simultaneous substitution ``symbol -> Poly``; see :func:`substitute`."""
        rules = {k: Poly.coerce(v) for k, v in rules.items()}
        out = Poly()
        power_cache: dict[tuple[str, int], Poly] = {}
        for mono, coef in self.terms.items():
            term = Poly.const(coef)
            rest = []
            for name, e in mono:
                if name in rules:
                    key = (name, e)
                    if key not in power_cache:
                        power_cache[key] = rules[name] ** e
                    term = term * power_cache[key]
                else:
                    rest.append((name, e))
            out = out + term * Poly({tuple(rest): 1})
        return out

    def evaluate(self, values: Mapping[str, object]):
        """Numeric value; exact when every value is rational."""
        total = 0
        for mono, coef in self.terms.items():
            term = coef
            for name, e in mono:
                term = term * values[name] ** e
            total = total + term
        return total

    def integrate(self, name: str) -> "Poly":
        out = {}
        for mono, coef in self.terms.items():
            exps = dict(mono)
            e = exps.get(name, 0)
            if e == -1:
                raise ValueError(f"integral of {name}**-1 is not a polynomial")
            exps[name] = e + 1
            out[tuple(sorted(exps.items()))] = coef / (e + 1)
        return Poly(out)

    # text -------------------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=_mono_key):
            coef = self.terms[mono]
            factors = [n if e == 1 else f"{n}^{e}" for n, e in mono]
            mag = abs(coef)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = f"{mag}*" + "*".join(factors)
            parts.append(("-" if coef < 0 else "+", body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Poly({str(self)!r})"


def _mono_key(mono: Monomial):
    return (-sum(abs(e) for _, e in mono), mono)


def symbols(names: str) -> tuple[Poly, ...]:
    return tuple(Poly.var(n) for n in names.split())


def _rule_order(rules: Mapping[str, object]):
    graph = {}
    for key, rule in rules.items():
        deps = rule.symbols() if isinstance(rule, (Poly, FormExpr)) else set()
        graph[key] = {d for d in deps if d in rules}
    try:
        tuple(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as exc:
        raise CyclicSubstitutionError(f"cyclic substitution rules: {exc.args[1]}") from exc


class FormExpr:
    """Linear combination ``sum_i f_i d(x_i)`` over declared coordinates.

    Coefficients are :class:`Poly` or any ring element exposing the same
    arithmetic plus ``diff`` and ``is_zero`` (e.g. graded series).
    """

    __slots__ = ("coords", "coeffs")

    def __init__(self, coords: Iterable[str], coeffs: Mapping[str, object] | None = None):
        self.coords = tuple(coords)
        if len(set(self.coords)) != len(self.coords):
            raise ValueError("coordinates must be distinct")
        coeffs = dict(coeffs or {})
        unknown = set(coeffs) - set(self.coords)
        if unknown:
            raise ValueError(f"differentials of undeclared coordinates: {sorted(unknown)}")
        self.coeffs = {k: (Poly.coerce(v) if isinstance(v, (int, Fraction)) else v)
                       for k, v in coeffs.items()}
        self.coeffs = {k: v for k, v in self.coeffs.items() if not v.is_zero()}

    def coefficient(self, coord: str):
        return self.coeffs.get(coord, Poly())

    def is_zero(self) -> bool:
        return not self.coeffs

    def symbols(self) -> set[str]:
        out = set()
        for v in self.coeffs.values():
            out |= v.symbols()
        return out

    def _merged_coords(self, other: "FormExpr") -> tuple[str, ...]:
        return self.coords + tuple(c for c in other.coords if c not in self.coords)

    def __add__(self, other: "FormExpr") -> "FormExpr":
        if isinstance(other, int) and other == 0:
            return self
        coords = self._merged_coords(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return FormExpr(coords, out)

    __radd__ = __add__

    def __neg__(self) -> "FormExpr":
        return FormExpr(self.coords, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "FormExpr") -> "FormExpr":
        return self + (-other)

    def __mul__(self, factor) -> "FormExpr":
        return FormExpr(self.coords, {k: v * factor for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if isinstance(other, FormExpr):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def d(self) -> dict[tuple[str, str], object]:
        """Exterior derivative: ``{(x_i, x_j): d_i f_j - d_j f_i}`` for ``i < j``."""
        out = {}
        for i, a in enumerate(self.coords):
            for b in self.coords[i + 1:]:
                val = self.coefficient(b).diff(a) - self.coefficient(a).diff(b)
                if not val.is_zero():
                    out[(a, b)] = val
        return out

    def is_closed(self) -> bool:
        return not self.d()

    def potential(self) -> Poly:
        """A function ``phi`` with ``d(phi) == self`` for a closed polynomial form.

        Integrates coordinate by coordinate, each time removing the part already
        accounted for.
        """
        if not self.is_closed():
            raise ValueError("form is not closed, so it has no potential")
        phi = Poly()
        for x in self.coords:
            remainder = self.coefficient(x) - phi.diff(x)
            phi = phi + remainder.integrate(x)
        return phi

    def subs(self, rules: Mapping[str, object], coords: Iterable[str] | None = None) -> "FormExpr":
        """Substitute into coefficients; differentials of substituted coordinates
        are rewritten by the chain rule over ``coords`` (the new coordinates)."""
        return substitute(self, rules, coords)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"({self.coeffs[c]}) d{c}" for c in self.coords if c in self.coeffs)

    def __repr__(self) -> str:
        return f"FormExpr({str(self)!r})"


def differential(f, coords: Iterable[str]) -> FormExpr:
    """``df = sum_i (df/dx_i) dx_i``; other symbols are constants."""
    coords = tuple(coords)
    known = f.symbols() if hasattr(f, "symbols") else set()
    return FormExpr(coords, {x: f.diff(x) for x in coords if x in known})


def substitute(expr, rules: Mapping[str, object], coords: Iterable[str] | None = None):
    """Simultaneous substitution into a Poly or FormExpr.

    For a FormExpr, ``d(x)`` of every substituted coordinate ``x`` becomes
    ``differential(rules[x], coords)``; ``coords`` defaults to the form's
    coordinates with substituted ones replaced by the coordinate symbols their
    rules introduce, in order of appearance.
    """
    _rule_order(rules)
    rules = {k: Poly.coerce(v) for k, v in rules.items()}
    if isinstance(expr, FormExpr):
        if coords is None:
            new = []
            for c in expr.coords:
                if c in rules:
                    new.extend(sorted(rules[c].symbols()))
                else:
                    new.append(c)
            coords = tuple(dict.fromkeys(new))
        coords = tuple(coords)
        out = FormExpr(coords)
        for c, coef in expr.coeffs.items():
            new_coef = coef.subs(rules)
            if c in rules:
                out = out + differential(rules[c], coords) * new_coef
            else:
                if c not in coords:
                    raise ValueError(f"coordinate {c!r} missing from the new coordinate list")
                out = out + FormExpr(coords, {c: new_coef})
        return out
    if hasattr(expr, "subs"):
        return expr.subs(rules)
    raise TypeError(f"cannot substitute into {type(expr).__name__}")

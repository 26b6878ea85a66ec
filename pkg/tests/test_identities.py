import time

import pytest
import sympy

from qconn.symbolic import identities as ids
from qconn.symbolic.poly import FormExpr, Poly, differential, substitute, symbols

m, v, w, g, g2, t2, x2 = symbols("m v w g g' t'' x''")
p1, p2, xp, yp = symbols("p'1 p'2 x' y'")


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start


def test_boost_identity_is_exact():
    res, secs = timed(ids.verify_boost_identity)
    assert res.is_zero() and str(res) == "0"
    assert secs < 1.0


def test_boost_identity_three_dimensions():
    assert ids.verify_boost_identity(3).is_zero()


def test_boost_identity_detects_missing_energy_term():
    res = ids.verify_boost_identity(wrong_phase=True)
    assert res == FormExpr(["t'", "x'"], {"t'": -m * v**2 / 2})


def test_acceleration_identity_is_exact():
    res, secs = timed(ids.verify_acceleration_identity)
    assert res.is_zero() and secs < 1.0


def test_acceleration_phase_is_potential_of_moved_form():
    # the phase is determined (up to a constant) by the difference of the two forms
    moved = substitute(ids.acceleration_frame_form(), {"p": Poly.var("p'") + m * g * Poly.var("t'")},
                       ["t'", "x'"])
    frame = FormExpr(["t'", "x'"], {"x'": Poly.var("p'"),
                                     "t'": -(Poly.var("p'") ** 2 / (2 * m) + m * g * xp)})
    phase = (moved - frame).potential()
    assert phase - ids.acceleration_phase() == 0


def test_acceleration_composition_is_exact():
    res, secs = timed(ids.verify_acceleration_composition)
    assert res == 0 and secs < 1.0
    assert ids.verify_composition_potential().is_zero()


def test_composed_phase_sum_coefficients():
    expected = m * (g + g2) * x2 * t2 + m * t2**3 * (g**2 + g2**2 + 3 * g * g2) / 6
    assert ids.composed_phase_sum() == expected


def test_rotation_identity_is_exact():
    res, secs = timed(ids.verify_rotation_identity)
    assert res == 0 and secs < 1.0


def test_rotation_identity_detects_sign_flip():
    j = xp * p2 - yp * p1
    assert ids.verify_rotation_identity(flip_sign=True) == 2 * w * j


def test_rotation_literal_pairing_is_not_an_identity():
    assert not ids.verify_rotation_identity(literal=True).is_zero()


def test_rindler_series_matches_target_through_constant_order():
    exp, secs = timed(ids.rindler_expand, 0)
    assert exp.residual.is_zero()
    assert secs < 10.0
    c = Poly.var("c")
    assert exp.leading_dt() == m * c**3
    for coef in exp.computed.coeffs.values():
        assert coef.order <= 0


def test_rindler_series_with_exact_energy_matches_too():
    assert ids.rindler_expand(0, exact_energy=True).residual.is_zero()


def test_rindler_first_correction_matches_independent_expansion():
    # sympy expands the exact components in e = 1/c with no shared code
    ms, gs, ts, xs, ps, e = sympy.symbols("m g t x p e", positive=True)
    c = 1 / e
    s = c * ts * gs / (c**2 + gs * xs)
    root = sympy.sqrt(1 + s**2)
    p0 = sympy.sqrt(ms**2 * c**4 + ps**2 * c**2)
    along = p0 * root - ps * c * s
    kin = ps - ms * gs * ts
    dt_res = c * along / root - (c * (ms * c**2 + kin**2 / (2 * ms) + ms * gs * xs)
                                 - c * ms * gs * (xs + gs * ts**2 / 2))
    dx_res = -along * s / root + p0 * s - ps * c * root - (-kin * c - c * ms * gs * ts)
    oracle_dt = sympy.series(dt_res, e, 0, 2).removeO()
    oracle_dx = sympy.series(dx_res, e, 0, 2).removeO()

    res = ids.rindler_expand(-1, exact_energy=True).residual
    rename = {"m": ms, "g": gs, "t": ts, "x'": xs, "p": ps}

    def as_sympy(series):
        poly = series.coefficient(-1)
        total = sympy.Integer(0)
        for mono, coef in poly.terms.items():
            term = sympy.Rational(coef.numerator, coef.denominator)
            for name, k in mono:
                term *= rename[name] ** k
            total += term
        return total * e

    assert sympy.simplify(as_sympy(res.coefficient("t")) - oracle_dt) == 0
    assert sympy.simplify(as_sympy(res.coefficient("x'")) - oracle_dx) == 0


def test_rindler_target_form():
    target = ids.rindler_target()
    c, pp = symbols("c p")
    assert target.coefficient("x'") == -pp * c
    assert target.coefficient("t").coefficient("c", 3) == m


def test_phase_differential_is_closed():
    assert differential(ids.acceleration_phase(), ["t'", "x'"]).is_closed()
    assert differential(ids.boost_phase(3), ["t'", "x1'", "x2'", "x3'"]).is_closed()

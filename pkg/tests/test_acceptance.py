"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with its measured values and
runtime, then asserts.  Run ``pytest tests/test_acceptance.py -v`` or
``python tests/test_acceptance.py`` for just the summary lines.
"""

import sys
import time

import numpy as np
import pytest
import scipy.linalg

from qconn import cli, frames
from qconn.forms import BaseChart, OperatorField, action_connection, curvature_covariance_check
from qconn.grid import (
    GridSpec,
    OperatorMatrix,
    build_hamiltonian,
    build_momentum,
    evolve,
    gaussian_packet,
    kinetic,
    l2_distance,
    position,
)
from qconn.suites import curvature_suite
from qconn.symbolic import identities as ids
from qconn.transport import Curve, ordered_exponential, transport_state

CHART = BaseChart(("t", "x"))


@pytest.fixture
def emit(capsys):
    def show(line):
        with capsys.disabled():
            print("\n" + line)
    return show


def verdict(emit, label, ok, detail, seconds, limit=None):
    if limit is not None and seconds >= limit:
        ok = False
        detail += f"; over the {limit:g} s budget"
    emit(f"{'PASS' if ok else 'FAIL'}  {label}: {detail} ({seconds:.2f} s)")
    assert ok, f"{label}: {detail}"


def const(op):
    return OperatorField.constant_operator(op, 2)


def test_c1_symbolic_exactness(emit):
    proofs = ("boost", "accel", "accel-compose", "rotation")
    worst, parts, ok = 0.0, [], True
    for name in proofs:
        start = time.perf_counter()
        rows = cli.PROOFS[name]({})
        secs = time.perf_counter() - start
        worst = max(worst, secs)
        literal = all(r["residual"] == "0" for r in rows)
        ok = ok and literal and secs < 1.0
        parts.append(f"{name}={'0' if literal else 'nonzero'}")
    verdict(emit, "C1 symbolic identities", ok, ", ".join(parts) + f"; slowest {worst:.3f} s", worst)


def test_c2_rindler_series(emit):
    start = time.perf_counter()
    exp = ids.rindler_expand(0)
    secs = time.perf_counter() - start
    ok = exp.residual.is_zero()
    verdict(emit, "C2 Rindler series through c^0", ok, f"residual {exp.residual}", secs, 10.0)


def test_c3_rindler_numeric_limit(emit):
    start = time.perf_counter()
    rep = frames.rindler_limit_scaling(m=1.0, g=1.0, t=0.1, x=0.2, p=0.3, cs=(1e2, 1e3, 1e4))
    secs = time.perf_counter() - start
    ok = rep.monotone and rep.slope <= -1.0
    res = ", ".join(f"{r:.4e}" for r in rep.residuals)
    verdict(emit, "C3 Rindler limit slope <= -1", ok, f"residuals [{res}], slope {rep.slope:.6f}", secs, 1.0)


def _frame_run(transform, refine):
    grid = GridSpec(40.0, 512)
    psi = gaussian_packet(grid, 0.0, 0.0, 1.0)
    return frames.verify_covariance(transform, psi, T=1.0, dt=1e-3, refine=refine)


def test_c4_boost_covariance(emit):
    start = time.perf_counter()
    rep = _frame_run(frames.galilean_boost(1.0, 1.0), ("dt", "richardson"))
    secs = time.perf_counter() - start
    halved = rep.rows("dt")[-1]
    ok = rep.discrepancy <= 1e-3 and abs(halved.reduction - 4.0) <= 0.8
    detail = (f"discrepancy {rep.discrepancy:.3e} (tol 1e-3), dt-halving factor {halved.reduction:.4f} "
              f"(want 4 +/- 0.8); solution temporal order {rep.temporal_order:.3f}")
    verdict(emit, "C4 boost covariance", ok, detail, secs, 30.0)


def test_c5_equivalence_principle(emit):
    start = time.perf_counter()
    rep = _frame_run(frames.uniform_acceleration(1.0, 1.0), ("dt", "richardson"))
    secs = time.perf_counter() - start
    halved = rep.rows("dt")[-1]
    ok = rep.discrepancy <= 5e-3 and abs(halved.order - 2.0) <= 0.3
    detail = (f"discrepancy {rep.discrepancy:.3e} (tol 5e-3), dt-refinement order {halved.order:.4f} "
              f"(want 2 +/- 0.3); solution temporal order {rep.temporal_order:.3f}")
    verdict(emit, "C5 equivalence principle", ok, detail, secs, 60.0)


def test_c6_rotating_frame(emit):
    start = time.perf_counter()
    grid = GridSpec(16.0, 64, dimension=2)
    psi = gaussian_packet(grid, (2.0, 0.0), 0.0, 1.0)
    hams = frames.rotation_hamiltonians(grid, 1.0, 0.1)
    a = evolve(hams["angular"], psi, 1e-3, 1000)
    b = evolve(hams["coriolis"], psi, 1e-3, 1000)
    forms_gap = l2_distance(a, b)
    rep = frames.verify_covariance(frames.uniform_rotation(1.0, 0.1), psi, T=1.0, dt=1e-3, refine=())
    secs = time.perf_counter() - start
    ok = forms_gap <= 1e-10 and rep.discrepancy <= 1e-2
    detail = f"J-form vs completed-square evolution {forms_gap:.2e} (tol 1e-10), covariance {rep.discrepancy:.3e} (tol 1e-2)"
    verdict(emit, "C6 rotating frame", ok, detail, secs, 300.0)


def test_c7_force_is_curvature(emit):
    start = time.perf_counter()
    parts, ok = [], True
    for name in ("free", "linear", "harmonic"):
        suite = curvature_suite(name, m=1.0, g=2.0, k=1.0)
        loop = min(suite.holonomy, key=lambda r: abs(r.delta - 0.05))
        if name == "free":
            good = all(r.error == 0 for r in suite.curvature) and \
                all(r.defect < 1e-12 and abs(r.phase) < 1e-12 for r in suite.holonomy)
            parts.append(f"free exact={good}")
        else:
            s_order = min(r.order for r in suite.curvature[1:])
            d_order = min(r.order for r in suite.holonomy[1:])
            rel = abs(loop.phase - loop.predicted_phase) / abs(loop.predicted_phase)
            good = s_order >= 1.8 and d_order >= 2.5 and rel <= 0.05
            parts.append(f"{name} h-order {s_order:.3f}, defect order {d_order:.3f}, "
                         f"phase {loop.phase:.5f} vs {loop.predicted_phase:.5f} (rel {rel:.1e})")
        ok = ok and good
    secs = time.perf_counter() - start
    verdict(emit, "C7 force is curvature", ok, "; ".join(parts), secs, 60.0)


def test_c8_gauge_covariance(emit):
    start = time.perf_counter()
    g = GridSpec(10.0, 32)
    x = position(g).toarray()
    omega = action_connection(CHART.with_steps(1e-2), const(build_hamiltonian(g, 1.0, lambda s: 0.5 * s**2)),
                              [const(build_momentum(g))])
    u = OperatorField(lambda p: OperatorMatrix(scipy.linalg.expm(1j * p[0] * p[1] * x)), 2)
    varying = curvature_covariance_check(omega, u, [(0.3, 0.7), (-0.2, 0.4)])
    rng = np.random.default_rng(2)
    a = rng.normal(size=(32, 32)) + 1j * rng.normal(size=(32, 32))
    fixed_u = const(OperatorMatrix(scipy.linalg.expm(1j * (a + a.conj().T) / 2)))
    fixed = curvature_covariance_check(omega, fixed_u, [(0.0, 0.0), (1.0, -1.0)])
    secs = time.perf_counter() - start
    ok = all(abs(o - 2.0) <= 0.3 for o in varying.orders) and max(fixed.residuals) <= 1e-9
    orders = ", ".join(f"{o:.3f}" for o in varying.orders)
    verdict(emit, "C8 gauge covariance", ok,
            f"FD orders [{orders}], constant unitary residual {max(fixed.residuals):.1e}", secs, 30.0)


def test_c9_transport_contract(emit):
    start = time.perf_counter()
    grid = GridSpec(16.0, 96)
    k, xop, p = kinetic(grid, 1.0), position(grid), build_momentum(grid)
    ham = OperatorField(lambda pt: OperatorMatrix.checked((k + xop * np.cos(pt[0])).matrix), 2,
                        constant=(False, True))
    omega = action_connection(CHART, ham, [const(p)])

    path = Curve([[0, 0], [0.4, 0.2], [0.1, 0.5], [0.0, -0.3]])
    unitary = ordered_exponential(omega, path, steps=4).unitarity_defect

    a = Curve([[0, 0], [0.3, 0.1]])
    b = Curve([[0.3, 0.1], [0.5, -0.2], [0.6, 0.0]])
    whole = ordered_exponential(omega, a.then(b), 3, estimate_error=False).operator.matrix
    parts = (ordered_exponential(omega, b, 3, estimate_error=False).operator.matrix
             @ ordered_exponential(omega, a, 3, estimate_error=False).operator.matrix)
    compose_gap = float(np.max(np.abs(whole - parts)))

    psi = gaussian_packet(grid, 0.5, 0.2)
    there = transport_state(omega, path, psi, 5)
    back = transport_state(omega, path.reversed(), there, 5)
    reverse_gap = float(np.max(np.abs(back.amplitudes - psi.amplitudes)))

    diffs = []
    for n in (10, 20, 40):
        u = ordered_exponential(omega, Curve.segment((0, 0), (1, 0)), n, estimate_error=False).operator
        cn = evolve(lambda t: ham((t, 0.0)), psi, 1.0 / n, n)
        diffs.append(np.sqrt(grid.cell) * np.linalg.norm(u.matrix @ psi.amplitudes - cn.amplitudes))
    orders = np.log2(np.array(diffs[:-1]) / np.array(diffs[1:]))
    secs = time.perf_counter() - start

    ok = (unitary <= 1e-10 and compose_gap <= 1e-12 and reverse_gap <= 1e-9
          and bool(np.all(np.abs(orders - 2.0) <= 0.3)))
    detail = (f"unitarity {unitary:.1e}, composition {compose_gap:.1e}, reversal {reverse_gap:.1e}, "
              f"CN orders [{', '.join(f'{o:.3f}' for o in orders)}]")
    verdict(emit, "C9 transport contract", ok, detail, secs)


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn(print)
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)

import numpy as np
import pytest
import scipy.linalg

from qconn.errors import NonUnitaryError
from qconn.forms import (
    BaseChart,
    OperatorField,
    OpOneForm,
    action_connection,
    connection_from_generators,
    curvature,
    curvature_covariance_check,
    exterior_derivative,
    gauge_transform,
    unitarity_error,
    wedge_square,
)
from qconn.grid import (
    GridSpec,
    OperatorMatrix,
    build_hamiltonian,
    build_momentum,
    gaussian_packet,
    max_abs,
    position,
)

CHART = BaseChart(("t", "x"))


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return OperatorMatrix((a + a.conj().T) / 2, hermitian=True)


def const(op, dim=2):
    return OperatorField.constant_operator(op, dim)


def test_chart_validation():
    with pytest.raises(ValueError):
        BaseChart(("t", "t"))
    with pytest.raises(ValueError):
        BaseChart(("t", "x"), (1e-3, -1.0))
    assert BaseChart(("t", "x", "y"), (0.1,)).steps == (0.1, 0.1, 0.1)
    assert CHART.with_steps(0.5).steps == (0.5, 0.5)


def test_free_connection_components():
    g = GridSpec(10.0, 32)
    h, p = build_hamiltonian(g, 1.0), build_momentum(g)
    omega = action_connection(CHART, const(h), [const(p)])
    wt, wx = omega.at((0.0, 0.0))
    assert max_abs((wt - h * 1j).matrix) == 0
    assert max_abs((wx + p * 1j).matrix) == 0


def test_components_are_anti_hermitian():
    gens = [const(random_hermitian(12, s)) for s in (1, 2)]
    omega = connection_from_generators(CHART, gens)
    for w in omega.at((0.3, -0.2)):
        assert max_abs((w + w.adjoint()).matrix) < 1e-12


def test_zero_generators_give_zero_form():
    z = OperatorMatrix.zeros(8)
    omega = connection_from_generators(CHART, [const(z), const(z)])
    two = curvature(omega).two_form
    assert max_abs(two.component(0, 1, (0, 0)).matrix) == 0


def test_generator_checks():
    with pytest.raises(ValueError, match="need 2 generators"):
        connection_from_generators(CHART, [const(OperatorMatrix.identity(4))])
    bad = OperatorMatrix(np.triu(np.ones((4, 4))))
    with pytest.raises(ValueError, match="not hermitian"):
        connection_from_generators(CHART, [const(bad), const(bad)])


def test_analytic_and_finite_difference_partials_agree():
    d = OperatorMatrix(np.diag(np.arange(1.0, 5.0)))
    field = OperatorField(lambda p: d * np.sin(p[0] * p[1]), 2,
                          partials=(lambda p: d * (p[1] * np.cos(p[0] * p[1])), None))
    point = np.array([0.4, 1.3])
    errs = []
    for step in (1e-2, 5e-3):
        fd = OperatorField(field.evaluate, 2).partial(0, point, step)
        errs.append(max_abs((fd - field.partial(0, point, step)).matrix))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_exterior_derivative_of_constant_fields_is_zero():
    omega = connection_from_generators(CHART, [const(random_hermitian(6, 0)), const(random_hermitian(6, 1))])
    assert max_abs(exterior_derivative(omega).component(0, 1, (1.0, 2.0)).matrix) == 0


def test_exterior_derivative_picks_up_time_derivative():
    # omega_t = i diag(f(t)) f = t^2 has no x dependence; omega_x = i diag(t^2)
    d = np.diag(np.arange(1.0, 4.0))
    wt = OperatorField(lambda p: OperatorMatrix(1j * d * p[0] ** 2), 2)
    wx = OperatorField(lambda p: OperatorMatrix(1j * np.eye(3) * p[0] ** 2), 2)
    omega = OpOneForm(CHART.with_steps(1e-3), [wt, wx])
    val = exterior_derivative(omega).component(0, 1, (3.0, 0.5))
    # d_t omega_x - d_x omega_t = 6i * identity
    assert max_abs(val.toarray() - 6j * np.eye(3)) < 1e-8


def test_exterior_derivative_is_linear():
    def field(seed):
        a, b = random_hermitian(5, seed), random_hermitian(5, seed + 10)
        return OperatorField(lambda p: a * (1j * np.sin(p[0])) + b * (1j * p[1] ** 2), 2)

    w1 = OpOneForm(CHART, [field(1), field(2)])
    w2 = OpOneForm(CHART, [field(3), field(4)])
    pt = (0.2, 0.7)
    lhs = exterior_derivative(w1 + w2).component(0, 1, pt)
    rhs = exterior_derivative(w1).component(0, 1, pt) + exterior_derivative(w2).component(0, 1, pt)
    assert max_abs((lhs - rhs).matrix) < 1e-10


def test_wedge_square_is_commutator():
    a, b = random_hermitian(6, 5), random_hermitian(6, 6)
    omega = connection_from_generators(CHART, [const(a), const(b)])
    val = wedge_square(omega).component(0, 1, (0, 0)).toarray()
    ia, ib = 1j * a.toarray(), 1j * b.toarray()
    assert max_abs(val - (ia @ ib - ib @ ia)) < 1e-12


def test_curvature_antisymmetry():
    gens = [const(random_hermitian(6, s), 3) for s in (1, 2, 3)]
    omega = connection_from_generators(BaseChart(("t", "x", "y")), gens)
    two = curvature(omega).two_form
    assert two.antisymmetry_error((0.1, 0.2, 0.3)) == 0
    assert max_abs((two.component(2, 1, (0, 0, 0)) + two.component(1, 2, (0, 0, 0))).matrix) == 0


def test_free_particle_curvature_vanishes():
    g = GridSpec(10.0, 64)
    omega = action_connection(CHART, const(build_hamiltonian(g, 1.0)), [const(build_momentum(g))])
    assert max_abs(curvature(omega).two_form.component(1, 0, (0, 0)).matrix) < 1e-12


@pytest.mark.parametrize("name,potential,slope", [
    ("linear", lambda x: 2.0 * x, lambda x: 2.0 + 0 * x),
    ("harmonic", lambda x: 0.5 * x**2, lambda x: x),
    ("quartic", lambda x: 0.25 * x**4, lambda x: x**3),
])
def test_curvature_is_minus_i_force_gradient(name, potential, slope):
    errs = []
    for n in (64, 128, 256):
        g = GridSpec(16.0, n)
        psi = gaussian_packet(g, 0.5).amplitudes
        omega = action_connection(CHART, const(build_hamiltonian(g, 1.0, potential)), [const(build_momentum(g))])
        curv = curvature(omega)
        om_xt = curv.two_form.component(1, 0, (0, 0))
        errs.append(np.sqrt(g.cell) * np.linalg.norm(om_xt.matrix @ psi + 1j * slope(g.x) * psi))
        f_xt = curv.field_strength.component(1, 0, (0, 0))
        assert max_abs((f_xt * 1j - om_xt).matrix) < 1e-12
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.8)


def test_gauge_transform_constant_unitary_is_conjugation():
    g = GridSpec(10.0, 24)
    omega = action_connection(CHART, const(build_hamiltonian(g, 1.0, lambda x: 2 * x)), [const(build_momentum(g))])
    u = OperatorMatrix(scipy.linalg.expm(1j * random_hermitian(24, 4).toarray()))
    moved = gauge_transform(omega, const(u))
    pt = (0.1, 0.2)
    for w, w2 in zip(omega.at(pt), moved.at(pt)):
        assert max_abs((w2 - u @ w @ u.adjoint()).matrix) < 1e-12


def test_gauge_transform_of_zero_form_with_commuting_exponent():
    k = np.diag(np.linspace(-1, 1, 6))
    zero = connection_from_generators(CHART, [const(OperatorMatrix.zeros(6))] * 2)
    u = OperatorField(lambda p: OperatorMatrix(scipy.linalg.expm(1j * p[0] * p[1] * k)), 2)
    moved = gauge_transform(zero.with_chart(CHART.with_steps(1e-4)), u)
    t, x = 0.6, -0.4
    wt, wx = moved.at((t, x))
    # U d(U^-1) = -i d(theta) K with theta = x t
    assert max_abs(wt.toarray() + 1j * x * k) < 1e-7
    assert max_abs(wx.toarray() + 1j * t * k) < 1e-7


def test_double_gauge_transform_returns_original():
    g = GridSpec(8.0, 16)
    k = random_hermitian(16, 9).toarray() / 10
    omega = action_connection(CHART.with_steps(1e-4), const(build_hamiltonian(g, 1.0)), [const(build_momentum(g))])
    u = OperatorField(lambda p: OperatorMatrix(scipy.linalg.expm(1j * p[0] * p[1] * k)), 2)
    u_inv = OperatorField(lambda p: u(p).adjoint(), 2)
    back = gauge_transform(gauge_transform(omega, u), u_inv)
    pt = (0.3, 0.5)
    for w, w2 in zip(omega.at(pt), back.at(pt)):
        assert max_abs((w - w2).matrix) < 1e-6


def test_gauge_transform_rejects_non_unitary():
    omega = connection_from_generators(CHART, [const(OperatorMatrix.zeros(3))] * 2)
    bad = const(OperatorMatrix(2 * np.eye(3)))
    with pytest.raises(NonUnitaryError):
        gauge_transform(omega, bad).at((0, 0))


def test_curvature_covariance_converges_at_second_order():
    g = GridSpec(10.0, 32)
    omega = action_connection(CHART.with_steps(1e-2), const(build_hamiltonian(g, 1.0)), [const(build_momentum(g))])
    x = position(g).toarray()
    u = OperatorField(lambda p: OperatorMatrix(scipy.linalg.expm(1j * p[0] * p[1] * x)), 2)
    report = curvature_covariance_check(omega, u, [(0.3, 0.7), (-0.2, 0.4)])
    assert report.residuals[0] > report.residuals[1] > report.residuals[2]
    assert all(abs(o - 2.0) <= 0.3 for o in report.orders)


def test_curvature_covariance_exact_for_constant_unitary():
    g = GridSpec(10.0, 32)
    omega = action_connection(CHART, const(build_hamiltonian(g, 1.0, lambda x: 2 * x)), [const(build_momentum(g))])
    u = const(OperatorMatrix(scipy.linalg.expm(1j * random_hermitian(32, 2).toarray())))
    report = curvature_covariance_check(omega, u, [(0.0, 0.0), (1.0, -1.0)])
    assert max(report.residuals) < 1e-9


def test_unitarity_error():
    assert unitarity_error(OperatorMatrix.identity(4)) == 0
    assert unitarity_error(OperatorMatrix(2 * np.eye(4))) == pytest.approx(3.0)

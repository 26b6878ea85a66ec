"""Discretised Hilbert spaces on uniform 1-D and 2-D grids.

The fibre of the bundle is modelled as the finite space of grid amplitudes with
the h-weighted inner product.  Momentum is the central-difference stencil and the
kinetic term is built from its square, so operator identities involving ``P``
hold exactly as matrix identities.  A Crank-Nicolson evolver serves as the
numerical reference for everything that evolves in time.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DomainError, GridMismatchError, SolverError

PERIODIC = "periodic"
DIRICHLET = "dirichlet"

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Uniform square grid on ``[-length/2, length/2)`` along every axis.

    Points are ``x_j = -length/2 + j*h`` with ``h = length/n``.  With Dirichlet
    boundaries the amplitudes are taken to vanish just outside the grid.
    """

    length: float
    n: int
    dimension: int = 1
    boundary: str = PERIODIC

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension}")
        if int(self.n) != self.n or self.n < 8:
            raise ValueError(f"need an integer n >= 8 points per axis, got {self.n}")
        if not np.isfinite(self.length) or self.length <= 0:
            raise ValueError(f"length must be positive and finite, got {self.length}")
        if self.boundary not in (PERIODIC, DIRICHLET):
            raise ValueError(f"unknown boundary condition {self.boundary!r}")

    @property
    def h(self) -> float:
        return self.length / self.n

    @property
    def size(self) -> int:
        return self.n**self.dimension

    @property
    def cell(self) -> float:
        """Quadrature weight of one grid point (``h**dimension``)."""
        return self.h**self.dimension

    @property
    def x(self) -> np.ndarray:
        return -0.5 * self.length + self.h * np.arange(self.n)

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of shape ``(n,)`` or ``(n, n)`` (``ij`` indexing)."""
        if self.dimension == 1:
            return (self.x,)
        return tuple(np.meshgrid(self.x, self.x, indexing="ij"))

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Flattened coordinate arrays matching the row-major state layout."""
        return tuple(c.ravel() for c in self.mesh())

    def wavenumbers(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.h)

    def refined(self, factor: int = 2) -> "GridSpec":
        return replace(self, n=self.n * factor)


@dataclass(frozen=True, eq=False)
class WaveState:
    """Grid amplitudes of a state together with its grid and time tag."""

    amplitudes: np.ndarray
    grid: GridSpec
    time: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        if amps.size != self.grid.size:
            raise GridMismatchError(
                f"state has {amps.size} amplitudes but grid holds {self.grid.size} points"
            )
        if not np.all(np.isfinite(amps)):
            raise ValueError("state amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.sqrt(self.grid.cell * np.vdot(self.amplitudes, self.amplitudes).real))

    def normalized(self) -> "WaveState":
        return self.with_amplitudes(self.amplitudes / self.norm())

    def with_amplitudes(self, amplitudes, time: float | None = None) -> "WaveState":
        return WaveState(amplitudes, self.grid, self.time if time is None else time)

    def reshaped(self) -> np.ndarray:
        return self.amplitudes.reshape((self.grid.n,) * self.grid.dimension)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Square matrix acting on grid amplitudes.

    ``matrix`` is either a dense ndarray or a scipy sparse matrix.  ``hermitian``
    is a promise checked on construction.
    """

    matrix: Union[np.ndarray, sp.spmatrix]
    hermitian: bool = False

    def __post_init__(self):
        m = self.matrix
        if sp.issparse(m):
            m = sp.csr_matrix(m, dtype=complex)
        else:
            m = np.asarray(m, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)
        if self.hermitian and self.hermiticity_error() >= HERMITIAN_TOL:
            raise ValueError(
                f"operator flagged hermitian but |A - A^H|_max = {self.hermiticity_error():.3e}"
            )

    @classmethod
    def checked(cls, matrix, tol: float = HERMITIAN_TOL) -> "OperatorMatrix":
        """Wrap ``matrix`` and set the hermiticity flag from an explicit check."""
        op = cls(matrix)
        return cls(op.matrix, hermitian=op.hermiticity_error() < tol)

    @classmethod
    def identity(cls, size: int) -> "OperatorMatrix":
        return cls(sp.identity(size, dtype=complex, format="csr"), hermitian=True)

    @classmethod
    def zeros(cls, size: int) -> "OperatorMatrix":
        return cls(sp.csr_matrix((size, size), dtype=complex), hermitian=True)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.array(self.matrix)

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.matrix.conj().T, self.hermitian)

    def hermiticity_error(self) -> float:
        return max_abs(self.matrix - self.matrix.conj().T)

    def apply(self, state: WaveState) -> WaveState:
        return state.with_amplitudes(self.matrix @ state.amplitudes)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(self.matrix @ other.matrix)
        if isinstance(other, WaveState):
            return self.apply(other)
        return self.matrix @ other

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(_combine(self.matrix, other.matrix, 1), self.hermitian and other.hermitian)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(_combine(self.matrix, other.matrix, -1), self.hermitian and other.hermitian)

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(-self.matrix, self.hermitian)

    def __mul__(self, scalar) -> "OperatorMatrix":
        if isinstance(scalar, OperatorMatrix):
            raise TypeError("use @ for operator products")
        scalar = complex(scalar)
        return OperatorMatrix(self.matrix * scalar, self.hermitian and scalar.imag == 0)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "OperatorMatrix":
        return self * (1.0 / complex(scalar))


def _combine(a, b, sign):
    if sp.issparse(a) and sp.issparse(b):
        return a + sign * b
    a = a.toarray() if sp.issparse(a) else a
    b = b.toarray() if sp.issparse(b) else b
    return a + sign * b


def max_abs(m) -> float:
    """Largest entry modulus of a dense or sparse matrix (0 for an empty one)."""
    if sp.issparse(m):
        m = sp.csr_matrix(m)
        m.eliminate_zeros()
        return float(np.abs(m.data).max()) if m.nnz else 0.0
    m = np.asarray(m)
    return float(np.abs(m).max()) if m.size else 0.0


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return OperatorMatrix(_combine(a.matrix @ b.matrix, b.matrix @ a.matrix, -1))


def _check_same_grid(*items):
    grids = {id(i.grid): i.grid for i in items}
    first = items[0].grid
    for g in grids.values():
        if g != first:
            raise GridMismatchError(f"grids differ: {first} vs {g}")


# -- operators -------------------------------------------------------------


def _difference_1d(grid: GridSpec) -> sp.csr_matrix:
    n, h = grid.n, grid.h
    upper = sp.diags(np.ones(n - 1), 1, shape=(n, n), format="lil")
    if grid.boundary == PERIODIC:
        upper[n - 1, 0] = 1.0
    upper = upper.tocsr()
    return ((-0.5j / h) * (upper - upper.T)).tocsr()


def _lift(op_1d, grid: GridSpec, axis: int) -> sp.csr_matrix:
    if grid.dimension == 1:
        return sp.csr_matrix(op_1d)
    eye = sp.identity(grid.n, format="csr")
    # row-major layout: flat index = ix * n + iy
    pieces = (op_1d, eye) if axis == 0 else (eye, op_1d)
    return sp.kron(*pieces, format="csr")


def build_momentum(grid: GridSpec, axis: int = 0) -> OperatorMatrix:
    """Central-difference momentum ``-i d/dx_axis``.

    The stencil is ``(P psi)_j = -i (psi_{j+1} - psi_{j-1}) / 2h`` with wraparound
    on periodic grids.  A plane wave ``exp(ikx)`` on a periodic grid is an
    eigenvector with eigenvalue ``sin(kh)/h``.
    """
    if not 0 <= axis < grid.dimension:
        raise ValueError(f"axis {axis} out of range for a {grid.dimension}-D grid")
    return OperatorMatrix.checked(_lift(_difference_1d(grid), grid, axis))


def position(grid: GridSpec, axis: int = 0) -> OperatorMatrix:
    return OperatorMatrix(sp.diags(grid.coordinates()[axis].astype(complex), format="csr"), True)


def potential_operator(grid: GridSpec, potential) -> OperatorMatrix:
    """Diagonal multiplication operator for ``potential``.

    ``potential`` may be an array of grid values or a callable taking the
    flattened coordinate arrays.
    """
    values = potential(*grid.coordinates()) if callable(potential) else potential
    values = np.broadcast_to(np.asarray(values, dtype=float), (grid.size,)).ravel()
    if not np.all(np.isfinite(values)):
        raise ValueError("potential has non-finite values")
    return OperatorMatrix(sp.diags(values.astype(complex), format="csr"), hermitian=True)


def kinetic(grid: GridSpec, mass: float) -> OperatorMatrix:
    """``sum_a P_a @ P_a / 2m`` using the squared first-difference stencil."""
    if not mass > 0:
        raise ValueError(f"mass must be positive, got {mass}")
    total = None
    for axis in range(grid.dimension):
        p = build_momentum(grid, axis).matrix
        term = p @ p
        total = term if total is None else total + term
    return OperatorMatrix.checked(total / (2.0 * mass))


def build_hamiltonian(grid: GridSpec, mass: float, potential=None) -> OperatorMatrix:
    """``H = P^2/2m + diag(V)``; ``potential=None`` means the free particle."""
    h = kinetic(grid, mass)
    if potential is not None:
        h = h + potential_operator(grid, potential)
    return OperatorMatrix.checked(h.matrix)


# -- states ----------------------------------------------------------------


def gaussian_packet(grid: GridSpec, center, momentum=0.0, width: float = 1.0) -> WaveState:
    """Normalised packet ``exp(-(x - x0)^2 / 4 sigma^2 + i p0 x)``.

    In 2-D ``center`` and ``momentum`` are pairs.
    """
    center = np.broadcast_to(np.asarray(center, dtype=float), (grid.dimension,))
    momentum = np.broadcast_to(np.asarray(momentum, dtype=float), (grid.dimension,))
    if width <= 3 * grid.h:
        raise DomainError(
            f"width {width} is not resolved by spacing h={grid.h:.4g}; need width > 3h "
            f"(use n > {int(np.ceil(3 * grid.length / width))} points or a wider packet)"
        )
    half = 0.5 * grid.length
    if grid.boundary == DIRICHLET and np.any(half - np.abs(center) < 5 * width):
        raise DomainError("packet must sit at least 5 widths from a Dirichlet wall")
    exponent = np.zeros(grid.size, dtype=complex)
    for c, p, x in zip(center, momentum, grid.coordinates()):
        exponent += -((x - c) ** 2) / (4 * width**2) + 1j * p * x
    return WaveState(np.exp(exponent), grid).normalized()


def free_packet_exact(grid: GridSpec, center: float, momentum: float, width: float,
                      t: float, mass: float = 1.0) -> np.ndarray:
    """Continuum free evolution of the 1-D Gaussian packet, sampled on the grid.

    Used as an oracle; not normalised on the grid.
    """
    x = grid.x
    tau = t / (2 * mass * width**2)
    amp = (2 * np.pi * width**2) ** -0.25 / np.sqrt(1 + 1j * tau)
    moved = x - center - momentum * t / mass
    return amp * np.exp(
        -moved**2 / (4 * width**2 * (1 + 1j * tau)) + 1j * momentum * x - 0.5j * momentum**2 * t / mass
    )


def inner_product(a: WaveState, b: WaveState) -> complex:
    """``(a, b) = h^d sum conj(a_j) b_j``."""
    _check_same_grid(a, b)
    return complex(a.grid.cell * np.vdot(a.amplitudes, b.amplitudes))


def norm(state: WaveState) -> float:
    return state.norm()


def expectation(op: OperatorMatrix, state: WaveState) -> complex:
    if op.size != state.grid.size:
        raise GridMismatchError("operator and state sizes differ")
    return complex(state.grid.cell * np.vdot(state.amplitudes, op.matrix @ state.amplitudes))


def l2_distance(a: WaveState, b: WaveState) -> float:
    _check_same_grid(a, b)
    diff = a.amplitudes - b.amplitudes
    return float(np.sqrt(a.grid.cell * np.vdot(diff, diff).real))


def boundary_weight(state: WaveState, fraction: float = 0.05) -> float:
    """Probability in the outer ``fraction`` of each axis (wraparound region)."""
    half = 0.5 * state.grid.length
    mask = np.zeros(state.grid.size, dtype=bool)
    for c in state.grid.coordinates():
        mask |= np.abs(c) > half * (1 - 2 * fraction)
    amps = state.amplitudes[mask]
    return float(state.grid.cell * np.vdot(amps, amps).real)


def fourier_interpolate(state: WaveState, points) -> np.ndarray:
    """Trigonometric interpolant of a periodic grid state at arbitrary points.

    ``points`` is a sequence of ``dimension`` coordinate arrays of equal shape.
    Exact at grid points and spectrally accurate for band-limited states.
    """
    grid = state.grid
    k = grid.wavenumbers()
    x0 = grid.x[0]
    coeffs = np.fft.fftn(state.reshaped()) / grid.size
    pts = [np.asarray(p, dtype=float).ravel() for p in points]
    if grid.dimension == 1:
        return np.exp(1j * np.outer(pts[0] - x0, k)) @ coeffs
    ex = np.exp(1j * np.outer(pts[0] - x0, k))
    ey = np.exp(1j * np.outer(pts[1] - x0, k))
    return np.einsum("pk,pk->p", ex @ coeffs, ey)


def resample(state: WaveState, grid: GridSpec) -> WaveState:
    """Fourier-resample ``state`` onto another periodic grid of the same extent."""
    if grid.length != state.grid.length or grid.dimension != state.grid.dimension:
        raise GridMismatchError("resampling needs the same extent and dimension")
    return WaveState(fourier_interpolate(state, grid.coordinates()), grid, state.time)


# -- time evolution --------------------------------------------------------

HamiltonianLike = Union[OperatorMatrix, Callable[[float], OperatorMatrix]]


def _cayley_factor(h: OperatorMatrix, dt: float):
    size = h.size
    eye = sp.identity(size, dtype=complex, format="csc")
    hm = sp.csc_matrix(h.matrix)
    lhs = (eye + 0.5j * dt * hm).tocsc()
    rhs = (eye - 0.5j * dt * hm).tocsr()
    try:
        lu = spla.splu(lhs)
    except RuntimeError as exc:
        cond = np.linalg.cond(lhs.toarray()) if size <= 4096 else float("inf")
        raise SolverError(
            f"Crank-Nicolson system is singular at dt={dt:g} (condition number ~{cond:.3e})"
        ) from exc
    return lu, rhs


def crank_nicolson_step(hamiltonian: HamiltonianLike, state: WaveState, dt: float) -> WaveState:
    """One step ``psi <- (1 + iH dt/2)^-1 (1 - iH dt/2) psi``.

    A callable Hamiltonian is evaluated at the step midpoint ``state.time + dt/2``.
    """
    return evolve(hamiltonian, state, dt, 1)


def evolve(hamiltonian: HamiltonianLike, state: WaveState, dt: float, steps: int) -> WaveState:
    """Apply ``steps`` Crank-Nicolson steps; the factorisation is reused for a
    time-independent Hamiltonian."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    psi = np.array(state.amplitudes)
    t = state.time
    if isinstance(hamiltonian, OperatorMatrix):
        _check_evolution_operator(hamiltonian, state)
        lu, rhs = _cayley_factor(hamiltonian, dt)
        for _ in range(steps):
            psi = lu.solve(rhs @ psi)
    else:
        for i in range(steps):
            h = hamiltonian(t + (i + 0.5) * dt)
            _check_evolution_operator(h, state)
            lu, rhs = _cayley_factor(h, dt)
            psi = lu.solve(rhs @ psi)
    return WaveState(psi, state.grid, t + steps * dt)


def _check_evolution_operator(h: OperatorMatrix, state: WaveState):
    if h.size != state.grid.size:
        raise GridMismatchError(f"Hamiltonian of size {h.size} does not act on a grid of {state.grid.size} points")
    if not h.hermitian:
        raise ValueError("Crank-Nicolson reference evolution needs a hermitian Hamiltonian")

"""Quantum mechanics on a finite grid phrased as a connection over spacetime.

Submodules: :mod:`~qconn.grid` (states, operators, Crank-Nicolson),
:mod:`~qconn.forms` (operator-valued forms and curvature),
:mod:`~qconn.transport` (ordered exponentials and holonomy),
:mod:`~qconn.frames` (changes of frame and covariance checks),
:mod:`~qconn.symbolic` (exact identities) and :mod:`~qconn.cli`.
"""

from .errors import (
    CyclicSubstitutionError,
    DomainError,
    GridMismatchError,
    InsufficientOrderError,
    NonUnitaryError,
    QconnError,
    SolverError,
    TransportError,
)
from .forms import (
    BaseChart,
    OperatorField,
    OpOneForm,
    OpTwoForm,
    action_connection,
    connection_from_generators,
    curvature,
    curvature_covariance_check,
    gauge_transform,
)
from .frames import (
    FrameTransform,
    compose_accelerations,
    galilean_boost,
    rindler_limit_scaling,
    uniform_acceleration,
    uniform_rotation,
    verify_covariance,
)
from .grid import (
    GridSpec,
    OperatorMatrix,
    WaveState,
    build_hamiltonian,
    build_momentum,
    evolve,
    gaussian_packet,
)
from .transport import Curve, holonomy, ordered_exponential, transport_state

__version__ = "0.1.0"

__all__ = [
    "BaseChart", "Curve", "CyclicSubstitutionError", "DomainError", "FrameTransform", "GridMismatchError",
    "GridSpec", "InsufficientOrderError", "NonUnitaryError", "OpOneForm", "OpTwoForm", "OperatorField",
    "OperatorMatrix", "QconnError", "SolverError", "TransportError", "WaveState", "action_connection",
    "build_hamiltonian", "build_momentum", "compose_accelerations", "connection_from_generators",
    "curvature", "curvature_covariance_check", "evolve", "galilean_boost", "gauge_transform",
    "gaussian_packet", "holonomy", "ordered_exponential", "rindler_limit_scaling", "transport_state",
    "uniform_acceleration", "uniform_rotation", "verify_covariance",
]

"""Sign and unit conventions used throughout the package.

Everything here is fixed once and asserted by tests (see ``tests/test_conventions.py``).

Units
    hbar = 1.  Phases are dimensionless and wavefunctions pick up ``exp(i * phase)``.

Generators
    ``P_mu = (H, -P)`` with coordinates ordered ``(t, x[, y])``.  ``P`` is the
    physical momentum ``-i d/dx`` on the grid.

Connection
    ``omega = i P_mu dx^mu``, so ``omega_t = iH`` and ``omega_x = -iP``.  Every
    component is anti-hermitian when the generators are hermitian.

Curvature
    ``Omega_{mu nu} = d_mu omega_nu - d_nu omega_mu + [omega_mu, omega_nu]`` and the
    field strength is ``F_{mu nu} = -i Omega_{mu nu}``.  For ``H = P^2/2m + V`` this
    gives ``F_{xt} = -dV/dx`` (force is curvature).

Transport
    Kets (coefficient columns) are transported by ``U = Pexp(-int omega)``; later
    segments multiply on the left.  Along ``t`` this is ``exp(-iHt)``, ordinary
    Schrödinger evolution.  Along ``x`` by ``+d`` it is ``exp(+iPd)``, which moves a
    packet centred at ``x0`` to ``x0 - d``: the coefficients are those of the same
    vector seen from a base point displaced by ``+d``.  Bras transport with the
    adjoint.

Holonomy
    A small rectangle traversed first along ``mu`` and then along ``nu`` gives
    ``U_loop = exp(-Omega_{mu nu} d_mu d_nu) + O(d^3)``.

Gauge transformation
    ``omega' = U omega U^-1 + U d(U^-1)`` and then ``Omega' = U Omega U^-1``.
"""

HBAR = 1.0

#: exponent sign of the transport operator ``exp(TRANSPORT_SIGN * int omega)``
TRANSPORT_SIGN = -1

#: ``omega_mu = CONNECTION_FACTOR * P_mu``
CONNECTION_FACTOR = 1j

#: spatial generator components enter ``P_mu`` with this sign
SPATIAL_GENERATOR_SIGN = -1

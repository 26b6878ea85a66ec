"""A potential bends the time-space plane of the action connection.

We build the connection for a particle in a linear and in a harmonic
potential, read off the field strength, and walk a state around small
rectangles in the (x, t) plane to watch the loop phase track force times area.
"""

from qconn.suites import curvature_suite

for name in ("free", "linear", "harmonic"):
    suite = curvature_suite(name, m=1.0, g=2.0, k=1.0)
    print(f"\n== {name} ==")
    print("   n        h      |Omega_xt + iV'|   order   <F_tx>    <V'>")
    for row in suite.curvature:
        print(f"{row.n:4d} {row.h:9.4f} {row.error:16.3e} {row.order:8.3f} "
              f"{row.mean_field_strength:8.4f} {row.expected_field_strength:8.4f}")

    # square loops: the defect against exp(-Omega area) shrinks like delta^3
    print("  delta     defect     order    loop phase   -<F_xt> area")
    for row in suite.holonomy:
        print(f"{row.delta:7.3f} {row.defect:10.3e} {row.order:8.3f} "
              f"{row.phase:12.6f} {row.predicted_phase:12.6f}")

"""The accelerated-frame action as the slow limit of a relativistic one.

Uniform acceleration is exactly a hyperbolic boost in Rindler coordinates.
Expanding the pulled-back one-form in powers of 1/c recovers the rest energy,
the Newtonian terms and the equivalence-principle phase; evaluating the exact
form at growing c shows the leftover shrinking like 1/c.
"""

from qconn import frames
from qconn.symbolic import identities as ids

exp = ids.rindler_expand(0)
print("expansion through c^0:", exp.computed)
print("target one-form      :", exp.target)
print("residual             :", exp.residual)
print("first correction     :", ids.rindler_expand(-1, exact_energy=True).residual)

rep = frames.rindler_limit_scaling()
for c, r in zip(rep.cs, rep.residuals):
    print(f"c = {c:8.0f}   |exact - target| = {r:.6e}")
# the next term has the opposite sign, so the slope approaches -1 from above
print(f"log-log slope {rep.slope:.6f}, monotone {rep.monotone}")

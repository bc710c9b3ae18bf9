"""Survey of the summation identities for the recoupling weights.

The pentagon (product formula) verifies to full precision.  The stated
backcoupling and hexagon identities do not close numerically, and the
triple-product operator equation fails with them; the truncated operator is
nevertheless unitary on its complete columns.  The residual functions
compute every stated form faithfully so the numbers below are the honest
state of affairs (see the repository README for the analysis).
"""

import random

from qcoupling import (QContext, verify_backcoupling, verify_biedenharn_elliott,
                       verify_hexagon, yang_baxter_residual, yang_baxter_unitarity_defect)
from qcoupling.coupling import backcoupling_forms_gap, hexagon_j_form_residual

ctx = QContext("0.5")
rng = random.Random(7)

print("pentagon identity (product formula), random labels:")
for _ in range(5):
    labels = [rng.randint(-2, 2) for _ in range(6)]
    res = verify_biedenharn_elliott(*labels, ctx)
    print(f"  labels {labels}: residual {float(res.value):.2e}")

print("\nbackcoupling identity as stated, random labels:")
for _ in range(4):
    labels = [rng.randint(0, 2)] + [rng.randint(-2, 2) for _ in range(5)]
    res = verify_backcoupling(*labels, ctx)
    print(f"  labels {labels}: residual {float(res.value):.2e}   <- does not close")
gap = backcoupling_forms_gap(1, 1, 0, -1, 2, 0, ctx)
print(f"  (weight form and series form agree with each other: gap {float(gap):.1e})")

print("\nhexagon identity as stated:")
print("  swap-symmetric labels close termwise:",
      f"{float(verify_hexagon(1, 1, 0, 0, 1, 0, 0, 1, 1, ctx).value):.2e}")
res = verify_hexagon(1, 1, 0, 0, -1, 0, 1, 0, 1, ctx)
print(f"  generic labels: residual {float(res.value):.2e}   <- does not close")
gl, gr = hexagon_j_form_residual(1, 1, 0, 0, -1, 0, 1, 0, 1, ctx)
print(f"  (series form reconstructs the weight form: gaps {float(gl):.1e}, {float(gr):.1e})")

print("\ntruncated braid operator on the pair space:")
print("  unitarity defect over complete columns:",
      f"{yang_baxter_unitarity_defect(1, 0, (-10, 10), ctx):.2e}")
probe = [(0, 0, 0), (1, -1, 0), (0, 1, -1)]
d = yang_baxter_residual(1, 0, -1, (-10, 10), ctx, probe=probe)
print(f"  triple-product defect (probe columns): {d:.2e}   <- does not close")

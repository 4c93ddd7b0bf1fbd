"""How large is a leaf's uniformizing disc, and how regular is that size across leaves?

Run: python demos/03_poincare_normalizer.py
"""
import math

import numpy as np

from leafmetric import estimate_field_constants, eta_lower, holder_scan, mln_fit
from leafmetric.cli import holder_pairs
from leafmetric.eta import radial_oracle
from leafmetric.fixtures import get_fixture

radial = get_fixture("radial")
const = estimate_field_constants(radial, 1.0, seed=0)
exact = radial_oracle(1.0)

# Leaves of z d/dz + w d/dw in the unit ball are punctured discs, with a
# closed form for the normalizer. The flow-disc bound recovers exactly half.
print("  |z|      lower bound    exact        ratio")
for r in (0.5, 1 / math.e, 0.1, 0.01):
    z = np.array([r, 0.0])
    lo, ex = eta_lower(radial, z, const).eta_lo, exact(z).eta_lo
    print(f"  {r:.4f}   {lo:.8f}   {ex:.8f}   {lo / ex:.6f}")

# Near a non-degenerate zero the normalizer behaves like d log(1/d).
X = get_fixture("example5")
fit = mln_fit(X, np.zeros(2), (1e-4, 1e-2), constants=estimate_field_constants(X, 0.5, seed=0))
print(f"\nexample5: eta / (d log* d) in [{fit.c_lo:.3f}, {fit.c_hi:.3f}], log-log slope {fit.slope:.4f}")

# Transverse regularity: |eta(x) - eta(y)| against the log* modulus.
rng = np.random.default_rng(0)
scan = holder_scan(holder_pairs(rng, np.zeros(2), 1000, (1e-4, 0.5)), [np.zeros(2)], exact)
print(f"radial scan: C = {scan.C:.4g}, alpha = {scan.alpha:.3f}, satisfied by {100 * scan.fraction_satisfied:.1f}% of pairs")

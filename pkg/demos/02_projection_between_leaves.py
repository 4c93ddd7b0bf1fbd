"""Sliding one leaf onto a neighbour, and how the slide degrades near a singular point.

Run: python demos/02_projection_between_leaves.py
"""
import numpy as np

from leafmetric import flow, project_time, projection_norms
from leafmetric.fixtures import get_fixture
from leafmetric.projection import transverse_partner

X = get_fixture("example5")

# Complex time: the leaf through x is parametrized by t -> phi_x(t).
x = np.array([0.2, 0.1j])
seg = flow(X, x, 0.3 + 0.2j)
print("phi_x(0.3+0.2i) =", np.round(seg.end, 10), f"({seg.steps_taken} steps, err {seg.error_estimate:.1e})")

# For a nearby y, each point phi_x(t) has a foot phi_y(u) on the leaf of y
# where the difference is orthogonal to the leaf. Newton finds u.
y = transverse_partner(X, x, 1e-3)
pr = project_time(X, x, y, 0.05)
print(f"\nt = 0.05 -> u = {pr.u:.12f}  ({pr.newton_iters} residual evaluations)")
ratio = pr.jac_u / np.linalg.norm(X(pr.y_u)) ** 4
print(f"Jacobian of the real system / ||X||^4 = {ratio:.6f}")

# Keep the relative gap fixed and approach the origin: the map stays close
# to the identity, but its derivatives along the leaf grow like 1/d and 1/d^2.
print("\n   d(x,0)    |Phi-id|/gap   |D Phi|/gap   |D^2 Phi|/gap")
direction = np.array([0.6, 0.8j])
for d in np.geomspace(1e-3, 1e-1, 5):
    xd = d * direction
    n = projection_norms(X, xd, transverse_partner(X, xd, 0.01 * d), probe_radius=0.05)
    print(f"  {d:.2e}   {n.c0 / n.separation:10.4f}   {n.c1 / n.separation:11.4g}   {n.c2 / n.separation:12.4g}")

"""Straightening a small Beltrami coefficient, and measuring one on a chain of projections.

Run: python demos/04_beltrami.py
"""
import numpy as np

from leafmetric import chain_mu_probe, chain_projections, solve_beltrami
from leafmetric.beltrami import gaussian_mu
from leafmetric.covers import cover_eta
from leafmetric.fixtures import get_fixture
from leafmetric.projection import transverse_partner

# The deviation of the principal solution from the identity scales with
# the C^1 size of mu, so the ratio kappa barely moves with the amplitude.
for amp in (0.025, 0.05, 0.1):
    mu = gaussian_mu(amp)
    q = solve_beltrami(mu)
    print(f"amplitude {amp:<6} iterations {q.iterations:2d}  residual {q.residual:.1e}  "
          f"kappa {q.deviation() / mu.c1_norm:.4f}")

# On 2z d/dz + w d/dw the leaves have explicit covers, so the projection
# between two leaves can be read in disc coordinates. Its Beltrami
# coefficient shrinks in step with the distance between the leaves.
X = get_fixture("diag21")
x = np.array([0.3, 0.45 + 0.1j])
for sep in (1e-3, 1e-4, 1e-5):
    chain = chain_projections(X, x, transverse_partner(X, x, sep), 0.1, 2.0, [np.zeros(2)],
                              lambda p: cover_eta(p, 2, 1.0))
    print(f"separation {sep:.0e}: {chain.N} steps, max |mu| + |d mu| = {chain_mu_probe(chain, 2, 1.0):.3e}")

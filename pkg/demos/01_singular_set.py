"""Where does a quadratic-cubic field vanish, and which zeros can be linearized?

Run: python demos/01_singular_set.py
"""
import numpy as np

from leafmetric import blow_up_pullback, find_singularities, format_field, one_jet
from leafmetric.fixtures import get_fixture
from leafmetric.projective import infinity_singularities

X = get_fixture("example5")
print("field:", format_field(X))

# A Newton sweep over a box in C^2 finds every affine zero.
zeros = find_singularities(X, radius=3.0)
print(f"\n{len(zeros)} zeros in the box:")
for s in zeros:
    lam = ", ".join(f"{l.real:+.4f}{l.imag:+.4f}i" for l in s.eigenvalues)
    tag = "resonant " + str(s.resonance_witness) if s.resonant else ""
    print(f"  {np.round(s.coords, 6)}  eigenvalues {lam}  {tag}")

# The origin has eigenvalues 2 and 1, and 2 = 0*2 + 2*1 is a resonance.
# Lifting both the field and its linear part through (t, w) -> (t w, w)
# shows they are not multiples of each other, so no chart linearizes it.
print("\nlift of the field:      ", format_field(blow_up_pullback(X)))
print("lift of the linear part:", format_field(blow_up_pullback(one_jet(X))))

inf = infinity_singularities(X)
print(f"\nzeros on the line at infinity: {len(inf.points)}; line entirely singular: {inf.line_singular}")

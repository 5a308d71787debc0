"""Locking intervals of the cubic family and the measure of what is left over.

Builds the tongues with denominator up to 64, prints the widest ones, and
shows how the unlocked parameter length shrinks as more tongues are added.
"""
from critcircle.atlas import build_atlas
from critcircle.family import CriticalFamily
from critcircle.fractal import box_dimension

fam = CriticalFamily(3)
atlas = build_atlas(fam, 64)

print("widest tongues")
for t in sorted(atlas, key=lambda t: t.width, reverse=True)[:8]:
    print(f"  {str(t.rho):>5}  [{t.t_lo:.6f}, {t.t_hi:.6f}]  width {t.width:.3e}")

for q in (8, 16, 32, 64):
    locked = sum(t.width for t in atlas if t.rho.denominator <= q)
    print(f"q <= {q:2d}: unlocked length {1 - locked:.4f}")

est = box_dimension(atlas, 64, [2.0**-j for j in range(6, 11)])
print(f"box-counting dimension of the unlocked set at q_max = 64: {est.value:.3f}")

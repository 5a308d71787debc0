"""Harmonic scalings h_n of the unit domain and the phase-space products.

h_n is the relative parameter length between consecutive harmonic
endpoints. The products h_n (n^3 + 1) stay bounded, while the fitted
exponent over small n is still well above -3.
"""
from critcircle.atlas import build_atlas
from critcircle.family import CriticalFamily
from critcircle.farey import UNIT
from critcircle.scaling import cubic_law_check, harmonic_scalings, phase_products

fam = CriticalFamily(3)
atlas = build_atlas(fam, depth=1, cutoff=24)
report = harmonic_scalings(atlas, UNIT, -24, 24)
products = phase_products(atlas, fam, UNIT, 24, report)

print(" n        h_n    h_n(n^3+1)   h_n * phase_sum")
for n in range(1, 25):
    print(f"{n:2d}  {report.h[n]:.3e}  {report.h[n] * (n**3 + 1):10.4f}  {products[n][1]:14.4f}")

slope, spread = cubic_law_check(report)
print(f"fitted slope {slope:.3f}, spread of h_n(n^3+1) {spread:.2f}")

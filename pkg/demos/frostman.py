"""Mass distribution on the cells of the harmonic tree and the cover estimate.

The measure passes mu(D) <= |D|^eta at eta = 0.3, which bounds the
dimension of the non-locked set from below; cover sums bound it from above.
"""
from critcircle.atlas import build_atlas
from critcircle.family import CriticalFamily
from critcircle.fractal import frostman_check, minimal_cutoff, upper_dimension_estimate

fam = CriticalFamily(3)
atlas = build_atlas(fam, depth=2, cutoff=6)

k = minimal_cutoff(atlas, 0.3, 2, 6)
rep = frostman_check(atlas, 0.3, 6, 2)
print(f"smallest valid cutoff {k}; passed {rep.passed}, max mu/|D|^eta {rep.max_excess:.3f}")
est = upper_dimension_estimate(atlas, 2, 6)
print(f"cover-sum estimate {est.value:.3f} at scales {est.scales}")

"""Passage through the quadratic funnel y -> y + alpha y^2 + eps.

The number of steps grows like eps^(-1/2) and about half of them are spent
in the slow region |y| < sqrt(eps / alpha).
"""
from critcircle.scaling import loglog_slope, saddle_sweep

eps = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7]
rows = saddle_sweep(1.0, eps, 1.0)
for r in rows:
    print(f"eps {r['eps']:.0e}: passage {r['passage_length']:6d}, "
          f"slow fraction {r['slow_fraction']:.3f}, sum 1/gap {r['reciprocal_gap_sum']:.3e}")
print(f"passage slope {loglog_slope(eps, [r['passage_length'] for r in rows]):.4f}")

"""
Bootstrapping k-item composites
===============================

Draw two k-item composites with replacement from eight items and correlate
them; repeat 1000 times per k.
"""

# %%
from gtheory.classical import alpha_from_matrix
from gtheory.simulate import BootstrapSpec, bootstrap_scale_reliability, one_factor_wave

wave = one_factor_wave(500, 8, alpha=0.66, seed=4)
print("alpha", round(alpha_from_matrix(wave.scores[:, :, 0])[0], 3))
for s in bootstrap_scale_reliability(wave, 1, BootstrapSpec([1, 2, 5, 10, 25], 1000, seed=4)):
    print(f"k={s.k:>2}  median {s.median:.3f}  IQR [{s.q25:.3f}, {s.q75:.3f}]")

"""
Classical reliability: alpha per wave, stability and scree
==========================================================
"""

# %%
import numpy as np

from gtheory.classical import (cross_wave_correlations, format_scale_table,
                               scale_reliability, scree_eigenvalues, spearman_brown)
from gtheory.simulate import GeneratorSpec, generate

spec = GeneratorSpec(300, 8, 5, dict(p=0.45, i=0.33, o=0.06, pi=0.28, po=0.05, io=1.14,
                                     pio=1.56), seed=3)
cube = generate(spec)
print(format_scale_table([scale_reliability(cube)]))

# %%
# Averaging items: a single item with reliability 0.2 needs many companions.
for n in (1, 4, 8, 16, 25):
    print(n, round(spearman_brown(0.2, n), 3))

# %%
np.set_printoptions(precision=2, suppress=True)
print(cross_wave_correlations(cube.scores[:, 0, :]))
print(scree_eigenvalues(cube, 1))

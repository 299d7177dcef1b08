"""
Estimating variance components from a simulated panel
=====================================================

Simulate a 172 x 8 x 5 panel with known components, estimate them back, and
check the estimator over repeated panels.
"""

# %%
from gtheory.gstudy import format_components, gstudy
from gtheory.published import CORRECTED
from gtheory.simulate import GeneratorSpec, generate, recovery_experiment

truth = dict(CORRECTED["white"].estimate)
spec = GeneratorSpec(172, 8, 5, truth, seed=1)
cube = generate(spec)
print(format_components(gstudy(cube), title="One simulated panel"))

# %%
rep = recovery_experiment(spec, 100)
for e, c in rep.components.items():
    print(f"{e:<4} truth {c.truth:.3f}  mean {c.mean_raw:.3f}  "
          f"SE/SD {c.se_ratio:.2f}  coverage {c.coverage:.2f}")

# %% [markdown]
# # Looking two steps into the Tanner graph
#
# Letting the assignment depend on the signs within distance two gives an LP
# over pattern orbits.  Its value is the expected cost per symbol; the
# smallest crossover probability where it turns negative is a tighter bound.

# %%
import numpy as np

from lpbounds import ChannelModel, bound2_objective_min, bsc_threshold_ub2, build_regular_code, expand_assignment, sample_llrs
from lpbounds.geometry import in_cone

for eps in (0.05, 0.15, 0.2, 0.22, 0.24):
    sol = bound2_objective_min(3, 4, eps)
    print(f"eps={eps:.2f}  {sol.status:9s} {sol.value if sol.value is not None else '-'}")

# %%
rep = bsc_threshold_ub2(3, 4)
print(rep)

# %%
# the optimal assignment, laid onto a concrete girth-6 graph, is a cone vector
sol = bound2_objective_min(3, 4, 0.15)
alpha = sol.point[:40]
code = build_regular_code(4000, 3, 4, seed=0, min_girth=6)
gamma = sample_llrs(ChannelModel.bsc(0.15), code.n, 0)
omega = expand_assignment(code, gamma, alpha, 3, 4)
print("in cone:", in_cone(omega, code, tol=1e-9))
# a single draw, so expect noise of order 1/sqrt(n)
print("per-symbol cost", gamma @ omega / code.n, "vs LP value", sol.value)

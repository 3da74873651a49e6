# %% [markdown]
# # LP decoding on small codes
#
# Decode a few LLR vectors on the Fano-plane code, compare with exhaustive
# ML, and watch the sign-only ratio test flag failures before the LP runs.

# %%
import numpy as np

from lpbounds import ChannelModel, build_pg2q_code, lp_decode, ml_decode_bruteforce, ratio_statistic, sample_llrs

fano = build_pg2q_code(1)
print(fano, "dimension", fano.dimension())

# %%
# one strongly negative LLR is enough to pull the optimum away from zero
gamma = np.array([1, 1, 1, 1, 1, 1, -10.0])
res = lp_decode(fano, gamma)
word, cost = ml_decode_bruteforce(fano, gamma)
print("LP", res.objective, res.omega_hat, "integral:", res.integral)
print("ML", cost, word)

# %%
# a BSC run: the LP never beats ML, and a failed ratio test always means an LP error
ch = ChannelModel.bsc(0.15)
rows = []
for t in range(200):
    g = sample_llrs(ch, fano.n, t)
    r = lp_decode(fano, g)
    rows.append((r.error_event, ml_decode_bruteforce(fano, g)[1] <= 0, not ratio_statistic(g, 3).passes))
rows = np.array(rows)
print("LP errors:", rows[:, 0].sum(), " ML errors:", rows[:, 1].sum(), " ratio failures:", rows[:, 2].sum())
print("ratio failure without LP error:", int((rows[:, 2] & ~rows[:, 0]).sum()))

# %% [markdown]
# # Bounds from sign-only assignments
#
# Put 1 on negative LLRs and 1/(w_row-1) on the rest.  The vector sits in the
# fundamental cone of every code with row weight w_row, so whenever it has
# negative cost the LP decoder fails.  Averaging over the channel gives
# threshold bounds.

# %%
import numpy as np

from lpbounds import ChannelModel, awgn_threshold_ub, bsc_threshold_ub, estimate_condition_violation, fig1_data, fig2_data

for w in (3, 4, 6, 10):
    sigma, snr = awgn_threshold_ub(w)
    print(f"w_row={w:2d}  BSC eps <= {float(bsc_threshold_ub(w)):.4f}   AWGN sigma <= {sigma:.4f} (Ec/sigma^2 = {snr:.4f})")

# %%
# the finite-length test sharpens around 1/w_row as n grows
for n in (100, 1000, 10000):
    rates = [estimate_condition_violation(3, 6, n, ChannelModel.bsc(e), 200, seed=1).rate for e in (0.12, 1 / 6, 0.21)]
    print(n, np.round(rates, 3))

# %%
for row in fig1_data([(3, 6), (4, 8), (3, 4), (5, 10)]):
    print(row)
for row in fig2_data([1, 2, 3, 4]):
    print(row)

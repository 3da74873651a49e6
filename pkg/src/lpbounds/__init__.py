"""LP decoding of binary LDPC codes and upper bounds on LP decoding thresholds."""

from .bounds0 import (
    asymptotic_condition,
    awgn_threshold_ub,
    bsc_threshold_ub,
    fig1_data,
    fig2_data,
    ratio_statistic,
)
from .bounds2 import (
    bound2_objective_min,
    bsc_threshold_ub2,
    build_cone_constraints,
    enumerate_orbits,
    expand_assignment,
    fig3_data,
    orbit_probability,
)
from .channels import ChannelModel, negative_moment, parse_channel, positive_moment, sample_llrs
from .codes import (
    Code,
    build_all_rows_code,
    build_bernoulli_code,
    build_pg2q_code,
    build_regular_code,
    girth,
)
from .decoder import DecodeResult, lp_decode, ml_decode_bruteforce
from .geometry import (
    LinearSystem,
    cone_inequalities,
    in_cone,
    in_polytope,
    polytope_inequalities,
    zero_neighborhood_completion,
)
from .gf2 import gf2_rank
from .lp import LpProblem, LpSolution, solve_lp
from .montecarlo import (
    SweepResult,
    estimate_condition_violation,
    estimate_lp_error_rate,
    estimate_ml_error_rate,
    wilson_interval,
)

__version__ = "0.1.0"

"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that pytest prints in its terminal
summary under "acceptance criteria".
"""

import math
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from conftest import record_criterion
from lpbounds.bounds0 import (
    awgn_threshold_ub,
    bsc_threshold_ub,
    default_fig1_pairs,
    fig1_data,
    fig2_data,
    ratio_statistic,
)
from lpbounds.bounds2 import (
    bound2_objective_min,
    bsc_threshold_ub2,
    build_cone_constraints,
    expand_assignment,
    orbit_count,
    reference_orbit,
)
from lpbounds.channels import ChannelModel, sample_llrs
from lpbounds.codes import build_bernoulli_code, build_pg2q_code, build_regular_code, girth
from lpbounds.decoder import lp_decode, ml_decode_bruteforce
from lpbounds.geometry import bernoulli_completion, in_cone, zero_neighborhood_completion
from lpbounds.lp import OPTIMAL, LpProblem, solve_lp
from lpbounds.montecarlo import estimate_condition_violation


@contextmanager
def criterion(number, label, limit):
    """Time the block, record the verdict, and fail on an assertion or an overrun."""
    start = time.perf_counter()
    info = {}
    try:
        yield info
    except Exception as exc:
        msg = (str(exc).splitlines() or [""])[0]
        record_criterion(number, label, False, time.perf_counter() - start, f"{type(exc).__name__}: {msg}")
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < limit
    record_criterion(number, label, ok, elapsed, info.get("detail", "") if ok else f"over the {limit} s budget")
    assert ok, f"criterion {number} took {elapsed:.1f} s, budget {limit} s"


def gf2_rank_oracle(H):
    """Plain row reduction on a boolean array, independent of the package's bit-packed version."""
    A = np.array(H, dtype=bool)
    rank = 0
    for col in range(A.shape[1]):
        pivots = np.flatnonzero(A[rank:, col])
        if pivots.size == 0:
            continue
        p = rank + pivots[0]
        A[[rank, p]] = A[[p, rank]]
        others = np.flatnonzero(A[:, col])
        others = others[others != rank]
        A[others] ^= A[rank]
        rank += 1
        if rank == A.shape[0]:
            break
    return rank


def test_criterion_01_sign_only_bsc_bound_exact():
    with criterion(1, "bsc_threshold_ub is exactly 1/w_row for w_row in 2..64", 1.0):
        for w in range(2, 65):
            v = bsc_threshold_ub(w)
            assert isinstance(v, Fraction) and v == Fraction(1, w), w


def test_criterion_02_figure1_table():
    with criterion(2, "fig1 table over the default regular grid", 1.0) as info:
        rows = fig1_data()
        expected = [(wc, wr) for wc in range(2, 7) for wr in range(wc + 1, 21)]
        assert default_fig1_pairs() == expected
        assert [(r.w_col, r.w_row) for r in rows] == expected
        for r in rows:
            assert r.rate == pytest.approx(1 - r.w_col / r.w_row, abs=1e-12)
            assert r.eps_ub == pytest.approx(1 / r.w_row, abs=1e-12)
        spot = {(r.w_col, r.w_row): r for r in rows}
        assert abs(spot[3, 6].rate - 0.5) <= 1e-7 and abs(spot[3, 6].eps_ub - 0.1666667) <= 1e-7
        assert abs(spot[4, 8].rate - 0.5) <= 1e-7 and abs(spot[4, 8].eps_ub - 0.125) <= 1e-7
        info["detail"] = f"{len(rows)} rows"


def test_criterion_03_figure2_table_and_pg_codes():
    with criterion(3, "fig2 rows and PG(2,2^s) matrices for s = 1..4", 30.0):
        rows = fig2_data([1, 2, 3, 4])
        for s, row in zip([1, 2, 3, 4], rows):
            q = 2**s
            n = q * q + q + 1
            rate = 1 - (3**s + 1) / n
            assert row.q == q and row.n == n
            assert abs(row.rate - rate) <= 1e-9 and abs(row.eps_ub - 1 / (q + 1)) <= 1e-9
            H = build_pg2q_code(s).H
            assert H.shape == (n, n)
            assert np.all(H.sum(axis=0) == q + 1) and np.all(H.sum(axis=1) == q + 1)
            assert gf2_rank_oracle(H) == round(n - n * rate) == 3**s + 1


WROWS_AWGN = (3, 4, 6)


def test_criterion_04_awgn_bound_cross_checks():
    with criterion(4, "AWGN sigma* closed form vs quadrature and Monte Carlo", 120.0) as info:
        parts = []
        for w in WROWS_AWGN:
            closed = awgn_threshold_ub(w, 1.0)[0]
            quad = awgn_threshold_ub(w, 1.0, method="quad")[0]
            mc = awgn_threshold_ub(w, 1.0, method="mc", n_samples=10**7, seed=w)[0]
            assert abs(closed - quad) <= 1e-8, (w, closed, quad)
            assert abs(mc - closed) <= 0.005 * closed, (w, closed, mc)
            parts.append(f"w_row={w}: {closed:.6f}")
        info["detail"] = ", ".join(parts)


def test_criterion_05_ratio_test_threshold_behaviour():
    with criterion(5, "ratio-test failure rate on either side of 1/6", 60.0) as info:
        above = estimate_condition_violation(3, 6, 10**4, ChannelModel.bsc(1 / 6 + 0.05), 200, seed=0)
        below = estimate_condition_violation(3, 6, 10**4, ChannelModel.bsc(1 / 6 - 0.05), 200, seed=0)
        assert above.rate >= 0.99, above.rate
        assert below.rate <= 0.01, below.rate
        info["detail"] = f"rates {above.rate:.3f} above, {below.rate:.3f} below"


def test_criterion_06_cone_certificate_soundness():
    with criterion(6, "zero-neighborhood certificate on 10^4 failing instances", 60.0):
        rng = np.random.default_rng(6)
        families = [build_regular_code(24, 3, 6, seed=1), build_regular_code(20, 3, 4, seed=2),
                    build_regular_code(40, 4, 8, seed=3), build_regular_code(30, 2, 5, seed=4)]
        found = 0
        trial = 0
        while found < 10**4:
            code = families[trial % len(families)]
            w_row = int(code.row_weights()[0])
            eps = rng.uniform(0.6 / w_row, 0.45)
            gamma = sample_llrs(ChannelModel.bsc(eps), code.n, trial)
            trial += 1
            if ratio_statistic(gamma, w_row).passes:
                continue
            found += 1
            w = zero_neighborhood_completion(gamma, w_row)
            assert in_cone(w, code, tol=0.0), trial
            assert gamma @ w < 0, trial


def _small_codes():
    specs = [(6, 2, 3), (9, 2, 3), (12, 2, 3), (8, 2, 4), (12, 2, 4), (8, 3, 4), (12, 3, 4),
             (12, 3, 6), (10, 2, 5), (12, 2, 6), (10, 3, 5), (12, 4, 6)]
    out = []
    seed = 0
    while len(out) < 20:
        n, wc, wr = specs[len(out) % len(specs)]
        seed += 1
        try:
            out.append(build_regular_code(n, wc, wr, seed=seed))
        except RuntimeError:
            continue
    return out


def test_criterion_07_lp_against_ml(fano):
    with criterion(7, "LP objective vs brute-force ML on 10^3 instances", 120.0) as info:
        codes = [fano] + _small_codes()
        assert all(c.n <= 12 for c in codes)
        channels = [ChannelModel.bsc(0.1), ChannelModel.bsc(0.25), ChannelModel.awgn(0.8), ChannelModel.awgn(2.0)]
        integral = 0
        for k in range(1000):
            code = codes[k % len(codes)]
            gamma = sample_llrs(channels[k % len(channels)], code.n, 70_000 + k)
            res = lp_decode(code, gamma)
            _, cost = ml_decode_bruteforce(code, gamma)
            assert res.objective <= cost + 1e-9, k
            if res.integral:
                integral += 1
                assert abs(res.objective - cost) <= 1e-9 * (1 + abs(cost)), k
        info["detail"] = f"{integral} integral optima"


def _bridge_assignments(w_col, w_row, rng, count, eps_hi):
    n_orb = orbit_count(w_col, w_row)
    cs = build_cone_constraints(w_col, w_row, nonneg=False)
    lower = np.zeros(cs.system.n_vars)
    upper = np.full(cs.system.n_vars, np.inf)
    ref = reference_orbit(w_col, w_row)
    lower[ref] = upper[ref] = 1.0
    out = []
    while len(out) < count:
        if len(out) % 2:
            sol = bound2_objective_min(w_col, w_row, rng.uniform(0.005, eps_hi))
        else:
            sol = solve_lp(LpProblem(rng.uniform(0.01, 1.0, cs.system.n_vars), cs.system, None, lower, upper))
        if sol.status == OPTIMAL:
            out.append(sol.point[:n_orb])
    return out


GRAPH_SIZES = {(3, 4): (40, 60, 80), (3, 5): (50, 75, 100), (3, 6): (60, 90, 120)}


@pytest.mark.parametrize("pair", [(3, 4), (3, 5), (3, 6)])
def test_criterion_08_two_neighborhood_bound(pair):
    w_col, w_row = pair
    # the three pairs share the 10 minute budget
    with criterion(8, f"2-neighborhood bound and bridge for {pair}", 200.0) as info:
        rep = bsc_threshold_ub2(w_col, w_row)
        assert abs(rep.restricted_eps - 1 / w_row) <= 1e-3, rep
        assert rep.eps_ub2 <= 1 / w_row + 1e-4, rep
        rng = np.random.default_rng(800 + w_row)
        alphas = _bridge_assignments(w_col, w_row, rng, 20, rep.eps_ub2 * 0.9)
        checked = 0
        for k, alpha in enumerate(alphas):
            n = GRAPH_SIZES[pair][k % 3]
            code = build_regular_code(n, w_col, w_row, seed=k, min_girth=6)
            assert girth(code) >= 6
            for t in range(5):
                gamma = sample_llrs(ChannelModel.bsc(rng.uniform(0.02, 0.45)), n, 1000 * k + t)
                assert in_cone(expand_assignment(code, gamma, alpha, w_col, w_row), code, tol=1e-9), (k, t)
                checked += 1
        assert checked == 100
        info["detail"] = f"eps_ub2 = {rep.eps_ub2:.5f}, sign-only {rep.restricted_eps:.5f}"


def test_criterion_09_bernoulli_family():
    with criterion(9, "Bernoulli-ensemble certificate in >= 99% of 200 trials", 60.0) as info:
        n, m, theta = 1000, 500, 0.5
        delta = 6 * math.sqrt(n * theta * (1 - theta))
        ch = ChannelModel.bsc(0.05)
        good = 0
        for t in range(200):
            code = build_bernoulli_code(n, m, theta, seed=9000 + t)
            gamma = sample_llrs(ch, n, t)
            w = bernoulli_completion(gamma, theta, delta)
            good += bool(in_cone(w, code, tol=0.0) and gamma @ w < 0)
        assert good >= 198, good
        info["detail"] = f"{good}/200"


CLI_RUNS = [
    ["gen-code", "--code", "regular:24,3,6", "--seed", "5"],
    ["gen-code", "--code", "pg:3", "--format", "json"],
    ["decode", "--code", "fano", "--llr", "{llr}", "--omega", "--json"],
    ["bound0", "--wrow", "6", "--channel", "bsc:0.2"],
    ["awgn-bound", "--wrow", "6", "--method", "mc", "--seed", "3"],
    ["bound2", "--wcol", "3", "--wrow", "4", "--tol", "1e-3", "--threads", "2"],
    ["fig1"],
    ["fig2", "--json"],
    ["fig3", "--pairs", "3:4", "--tol", "1e-3"],
    ["sweep", "--wrow", "6", "--n", "2000", "--grid", "0.1,0.15,0.2", "--trials", "50", "--seed", "4"],
    ["sweep", "--mode", "lp", "--code", "fano", "--channel", "awgn", "--grid", "0.6,1.2", "--trials", "40",
     "--threads", "2", "--json"],
]


def test_criterion_10_cli_determinism(tmp_path):
    with criterion(10, "every subcommand is byte-stable across two runs", 300.0) as info:
        llr = tmp_path / "llr.json"
        llr.write_text("[0.4, -1.1, 2, 0.7, 1.5, -0.2, 0.9]")
        for i, argv in enumerate(CLI_RUNS):
            argv = [a.replace("{llr}", str(llr)) for a in argv]
            blobs = []
            for k in range(2):
                out = tmp_path / f"run{i}_{k}"
                proc = subprocess.run([sys.executable, "-m", "lpbounds", *argv, "--out", str(out)],
                                      capture_output=True, text=True)
                assert proc.returncode == 0, (argv, proc.stderr)
                blobs.append(out.read_bytes())
            assert blobs[0] == blobs[1] and blobs[0], argv
        commands = {a[0] for a in CLI_RUNS}
        assert commands == {"gen-code", "decode", "bound0", "awgn-bound", "bound2", "fig1", "fig2", "fig3", "sweep"}
        info["detail"] = f"{len(CLI_RUNS)} invocations"

import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from lpbounds.bounds0 import ratio_statistic
from lpbounds.channels import ChannelModel, sample_llrs
from lpbounds.codes import Code, build_regular_code
from lpbounds.decoder import DecoderError, lp_decode, ml_decode_bruteforce, read_llr_file
from lpbounds.geometry import LinearSystem, polytope_inequalities
from lpbounds.gf2 import enumerate_codewords
from lpbounds.lp import OPTIMAL, LpProblem, solve_lp


def face_lp_unique(code, gamma):
    """Two-stage oracle: min over P, then max sum(w) over the optimal face at 0."""
    P = polytope_inequalities(code)
    first = solve_lp(LpProblem(gamma, P))
    if first.value < -1e-7:
        return False
    face = P + LinearSystem.from_rows(code.n, [(list(range(code.n)), list(gamma), "<=", 1e-9)])
    second = solve_lp(LpProblem(-np.ones(code.n), face), rule="bland")
    assert second.status == OPTIMAL
    return -second.value <= 1e-6


def peeling_succeeds(code, erased):
    erased = set(np.flatnonzero(erased).tolist())
    progress = True
    while erased and progress:
        progress = False
        for r in code.rows:
            hit = [i for i in r.tolist() if i in erased]
            if len(hit) == 1:
                erased.discard(hit[0])
                progress = True
    return not erased


@st.composite
def small_codes(draw):
    wc, wr, n = draw(st.sampled_from([(2, 3, 6), (2, 4, 8), (3, 4, 8), (3, 6, 12), (2, 3, 9), (3, 4, 12)]))
    try:
        return build_regular_code(n, wc, wr, draw(st.integers(0, 10**6)))
    except RuntimeError:
        assume(False)


class TestExamples:
    def test_all_positive(self, fano):
        r = lp_decode(fano, np.ones(7))
        assert r.objective == 0 and r.all_zeros_unique and not r.error_event and r.integral
        assert np.all(r.omega_hat == 0)

    def test_fano_strong_negative(self, fano):
        gamma = np.array([1, 1, 1, 1, 1, 1, -10.0])
        r = lp_decode(fano, gamma)
        assert r.objective < 0 and r.error_event
        _, cost = ml_decode_bruteforce(fano, gamma)
        assert r.objective == pytest.approx(cost)

    def test_single_check(self, single_check):
        r = lp_decode(single_check, np.array([-1.0, -1.0, 3.0]))
        assert r.objective == pytest.approx(-2.0) and np.allclose(r.omega_hat, [1, 1, 0]) and r.error_event

    def test_zero_costs_tie(self, fano):
        # every codeword ties with all-zeros
        assert lp_decode(fano, np.zeros(7)).error_event

    def test_wrong_length(self, fano):
        with pytest.raises(ValueError):
            lp_decode(fano, np.ones(6))

    def test_nan(self, fano):
        with pytest.raises(ValueError):
            lp_decode(fano, np.full(7, np.nan))

    def test_minus_infinity(self, fano):
        gamma = np.ones(7)
        gamma[2] = -np.inf
        r = lp_decode(fano, gamma)
        assert r.objective == -math.inf and r.error_event and r.omega_hat[2] == 1.0

    def test_plus_infinity_fixes_zero(self, fano):
        gamma = np.full(7, np.inf)
        gamma[[0, 1]] = -0.5
        r = lp_decode(fano, gamma)
        assert np.all(r.omega_hat[2:] == 0)
        # a single check with two free variables and the rest fixed still allows nothing
        assert not r.error_event or r.objective < 0


class TestMl:
    def test_all_positive(self, fano):
        word, cost = ml_decode_bruteforce(fano, np.ones(7))
        assert not word.any() and cost == 0

    def test_repetition(self):
        word, cost = ml_decode_bruteforce(Code.from_matrix([[1, 1]]), np.array([-3.0, 1.0]))
        assert word.tolist() == [1, 1] and cost == -2

    def test_lexicographic_ties(self, fano):
        word, cost = ml_decode_bruteforce(fano, np.zeros(7))
        assert cost == 0 and not word.any()

    def test_matches_enumeration(self, fano):
        rng = np.random.default_rng(1)
        words = enumerate_codewords(fano.H)
        for _ in range(50):
            g = rng.standard_normal(7)
            word, cost = ml_decode_bruteforce(fano, g)
            assert cost == pytest.approx((words @ g).min())

    def test_cap(self):
        code = Code.from_matrix(np.eye(30, dtype=int)[:2])
        with pytest.raises(ValueError):
            ml_decode_bruteforce(code, np.ones(30))


class TestUniquenessCertificate:
    @given(small_codes(), st.integers(0, 2**32 - 1), st.sampled_from([0.05, 0.15, 0.3]))
    def test_matches_face_lp_on_bsc(self, code, seed, eps):
        gamma = sample_llrs(ChannelModel.bsc(eps), code.n, seed)
        assert lp_decode(code, gamma).all_zeros_unique == face_lp_unique(code, gamma)

    @given(small_codes(), st.integers(0, 2**32 - 1))
    def test_matches_face_lp_on_awgn(self, code, seed):
        gamma = sample_llrs(ChannelModel.awgn(1.2), code.n, seed)
        assert lp_decode(code, gamma).all_zeros_unique == face_lp_unique(code, gamma)

    @given(small_codes(), st.integers(0, 2**32 - 1), st.sampled_from([0.1, 0.3, 0.5, 0.7]))
    def test_bec_matches_stopping_sets(self, code, seed, eps):
        gamma = sample_llrs(ChannelModel.bec(eps), code.n, seed)
        assert lp_decode(code, gamma).all_zeros_unique == peeling_succeeds(code, gamma == 0)


class TestRelaxation:
    @given(small_codes(), st.integers(0, 2**32 - 1))
    def test_lp_below_ml(self, code, seed):
        gamma = sample_llrs(ChannelModel.awgn(0.9), code.n, seed)
        r = lp_decode(code, gamma)
        word, cost = ml_decode_bruteforce(code, gamma)
        assert r.objective <= cost + 1e-9
        if r.integral:
            assert r.objective == pytest.approx(cost, abs=1e-9)
            rounded = np.round(r.omega_hat).astype(int)
            assert not ((code.H @ rounded) % 2).any()

    def test_ml_error_implies_lp_error(self, fano):
        words = enumerate_codewords(fano.H)[1:]
        for seed in range(300):
            gamma = sample_llrs(ChannelModel.bsc(0.2), 7, seed)
            ml_error = (words @ gamma).min() <= 0
            if ml_error:
                assert lp_decode(fano, gamma).error_event


class TestSymmetry:
    def test_reference_codeword_flip(self, fano):
        """Decoding flipped LLRs against codeword c mirrors decoding against zero, trial by trial."""
        words = enumerate_codewords(fano.H)
        rng = np.random.default_rng(0)
        for seed in range(10_000):
            gamma = sample_llrs(ChannelModel.bsc(0.15), 7, seed)
            c = words[rng.integers(len(words))]
            flipped = np.where(c == 1, -gamma, gamma)
            assert lp_decode(fano, gamma).error_event == lp_decode(fano, flipped, reference=c).error_event

    def test_reference_inconsistent_with_infinity(self, fano):
        c = enumerate_codewords(fano.H)[1]
        gamma = np.ones(7)
        gamma[np.flatnonzero(c)[0]] = np.inf  # says bit is certainly 0
        assert lp_decode(fano, gamma, reference=c).error_event


class TestNecessaryConditions:
    def test_no_error_means_cost_nonnegative_on_P(self, fano):
        rng = np.random.default_rng(5)
        P = polytope_inequalities(fano)
        vertices = np.array([solve_lp(LpProblem(rng.standard_normal(7), P)).point for _ in range(200)])
        weights = rng.dirichlet(np.ones(len(vertices)), size=800)
        points = np.vstack([vertices, weights @ vertices])
        assert len(points) == 1000
        checked = 0
        for seed in range(200):
            gamma = sample_llrs(ChannelModel.bsc(0.1), 7, seed)
            if not lp_decode(fano, gamma).error_event:
                checked += 1
                assert np.all(points @ gamma >= -1e-9)
        assert checked > 50

    @pytest.mark.parametrize("n", [12, 48, 100])
    def test_ratio_failure_implies_lp_error(self, n, fano):
        cases = [(fano, 3)] if n == 12 else [(build_regular_code(n, 3, 4, seed=n), 4)]
        for code, w_row in cases:
            for seed in range(60):
                gamma = sample_llrs(ChannelModel.bsc(0.22), code.n, seed)
                if not ratio_statistic(gamma, w_row).passes:
                    assert lp_decode(code, gamma).error_event


class TestRecord:
    def test_to_record(self, fano):
        rec = lp_decode(fano, np.ones(7)).to_record(include_omega=True)
        assert rec == {"objective": 0.0, "integral": True, "error_event": False, "omega": [0.0] * 7}
        json.dumps(rec)

    def test_infinite_objective_record(self, fano):
        g = np.ones(7)
        g[0] = -np.inf
        assert lp_decode(fano, g).to_record()["objective"] == "-inf"

    def test_read_llr_file(self, tmp_path):
        p = tmp_path / "llr.json"
        p.write_text(json.dumps([1.5, "inf", "-inf", -2]))
        assert read_llr_file(p).tolist() == [1.5, math.inf, -math.inf, -2.0]

    @pytest.mark.parametrize("payload", ['{"a": 1}', '["x"]', "[true]"])
    def test_read_llr_file_errors(self, tmp_path, payload):
        p = tmp_path / "llr.json"
        p.write_text(payload)
        with pytest.raises(ValueError):
            read_llr_file(p)

    def test_decoder_error_is_runtime_error(self):
        assert issubclass(DecoderError, RuntimeError)

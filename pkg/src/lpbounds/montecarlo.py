"""Monte Carlo estimates of the sign-only condition failure rate and the LP block-error rate.

Trial ``t`` of a run with base seed ``s`` draws its LLRs from
``numpy.random.default_rng(s + t)``, so serial and parallel runs agree
exactly and two estimates with the same seed are paired trial by trial.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .bounds0 import ratio_statistic
from .channels import ChannelModel, sample_llrs
from .codes import Code
from .decoder import DecoderError, lp_decode
from .gf2 import enumerate_codewords

Z95 = float(norm.ppf(0.975))


def trial_seed(seed: int, trial: int) -> int:
    return int(seed) + int(trial)


def wilson_interval(failures: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= failures <= trials:
        raise ValueError("failures must lie in [0, trials]")
    p = failures / trials
    z2 = z * z
    denom = 1 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    lo, hi = max(0.0, center - half), min(1.0, center + half)
    # guard against rounding pushing the estimate outside
    return min(lo, p), max(hi, p)


@dataclass
class SweepPoint:
    param: str
    trials: int
    failures: int
    seconds: float = 0.0
    decoder_failures: int = 0
    failed_trials: list[int] = field(default_factory=list, repr=False)

    @property
    def rate(self) -> float:
        return self.failures / self.trials

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.failures, self.trials)


@dataclass
class SweepResult:
    points: list[SweepPoint]

    def to_csv(self, timing: bool = False) -> str:
        """``param,trials,failures,rate,ci_lo,ci_hi,seconds``; ``seconds`` is left blank unless ``timing``."""
        lines = ["param,trials,failures,rate,ci_lo,ci_hi,seconds"]
        for p in self.points:
            lo, hi = p.ci
            secs = f"{p.seconds:.9g}" if timing else ""
            lines.append(f"{p.param},{p.trials},{p.failures},{p.rate:.9g},{lo:.9g},{hi:.9g},{secs}")
        return "\n".join(lines) + "\n"


def _map(fn, items, workers: int):
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _check_trials(trials: int) -> None:
    if trials < 1:
        raise ValueError("trials must be positive")


def estimate_condition_violation(
    w_col: int, w_row: int, n: int, ch: ChannelModel, trials: int, seed: int, workers: int = 1
) -> SweepPoint:
    """Fraction of length-``n`` LLR blocks that fail the ratio test.

    ``w_col`` does not enter the test; it is kept so the point is labelled by
    the ensemble it stands for.
    """
    _check_trials(trials)
    start = time.perf_counter()

    def one(t):
        return not ratio_statistic(sample_llrs(ch, n, trial_seed(seed, t)), w_row).passes

    fails = _map(one, range(trials), workers)
    failed = [t for t, f in enumerate(fails) if f]
    return SweepPoint(
        f"({w_col},{w_row}) n={n} {ch.describe()}", trials, len(failed),
        time.perf_counter() - start, failed_trials=failed,
    )


def estimate_lp_error_rate(code: Code, ch: ChannelModel, trials: int, seed: int, workers: int = 1) -> SweepPoint:
    """Fraction of trials whose LP decode is a block error.

    Trials where the solver itself fails are not counted as errors; they are
    reported in ``decoder_failures`` and excluded from ``trials``.
    """
    _check_trials(trials)
    start = time.perf_counter()

    def one(t):
        try:
            return lp_decode(code, sample_llrs(ch, code.n, trial_seed(seed, t))).error_event
        except DecoderError:
            return None

    outcomes = _map(one, range(trials), workers)
    failed = [t for t, e in enumerate(outcomes) if e]
    broken = sum(e is None for e in outcomes)
    done = trials - broken
    if done == 0:
        raise DecoderError("every trial failed inside the LP solver")
    return SweepPoint(
        f"n={code.n} {ch.describe()}", done, len(failed), time.perf_counter() - start,
        decoder_failures=broken, failed_trials=failed,
    )


def estimate_ml_error_rate(code: Code, ch: ChannelModel, trials: int, seed: int) -> SweepPoint:
    """Same trials as :func:`estimate_lp_error_rate`, decoded by exhaustive ML.

    A trial is an error when some nonzero codeword costs at most as much as
    the all-zeros word, which matches the LP error event.
    """
    _check_trials(trials)
    start = time.perf_counter()
    words = enumerate_codewords(code.H)
    words = words[words.any(axis=1)]
    failed = []
    for t in range(trials):
        gamma = sample_llrs(ch, code.n, trial_seed(seed, t))
        finite = np.where(np.isinf(gamma), 0.0, gamma)
        costs = words @ finite
        costs[words[:, gamma == np.inf].any(axis=1)] = np.inf
        costs[words[:, gamma == -np.inf].any(axis=1)] = -np.inf
        if words.size and costs.min() <= 0:
            failed.append(t)
    return SweepPoint(f"n={code.n} {ch.describe()} ml", trials, len(failed), time.perf_counter() - start,
                      failed_trials=failed)


def sweep(estimator, grid, **kwargs) -> SweepResult:
    """Run ``estimator(value, **kwargs)`` over ``grid`` and collect the points."""
    return SweepResult([estimator(v, **kwargs) for v in grid])

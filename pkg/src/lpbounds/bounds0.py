"""Threshold bounds from assignments that look only at the sign of each LLR.

A vector that puts ``1`` on negative LLRs and ``1/(w_row-1)`` elsewhere lies
in the fundamental cone of every ``(w_col, w_row)``-regular code.  If it has
negative cost the all-zeros word cannot be the unique LP optimum, which gives
the ratio test below and, through the law of large numbers, the threshold
upper bounds for the BSC and the AWGNC.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np
from scipy import optimize
from scipy.special import entr

from . import channels
from .channels import ChannelModel
from .codes import pg2q_rate

SIGMA_BRACKET = (1e-3, 1e3)
SIGMA_XTOL = 1e-13
MC_SAMPLES = 10**7

FIG1_WCOL = range(2, 7)
FIG1_WROW_MAX = 20
FIG1_GRID_NOTE = "w_col in 2..6, w_row in w_col+1..20 (chosen grid)"


@dataclass(frozen=True)
class RatioReport:
    gamma_pos: float
    gamma_neg: float
    ratio: float
    passes: bool


@dataclass(frozen=True)
class Bound0Report:
    """Outcome of the asymptotic sign-only condition for one channel and row weight.

    ``boundary`` flags the case ``lhs == w_row - 1``, which still counts as
    holding.  ``eps_ub`` is filled for the BSC and ``sigma_ub`` for the AWGNC.
    """

    channel: str
    w_row: int
    lhs: float
    condition_holds: bool
    boundary: bool = False
    eps_ub: Fraction | None = None
    sigma_ub: float | None = None

    def to_record(self) -> dict:
        rec = {
            "channel": self.channel,
            "w_row": self.w_row,
            "lhs": _num(self.lhs),
            "condition_holds": self.condition_holds,
            "boundary": self.boundary,
        }
        if self.eps_ub is not None:
            rec["eps_ub"] = _num(float(self.eps_ub))
        if self.sigma_ub is not None:
            rec["sigma_ub"] = _num(self.sigma_ub)
        return rec


def _num(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(f"{v:.9g}")


def ratio_statistic(gamma, w_row: int) -> RatioReport:
    """Compare ``gamma_pos / gamma_neg`` with ``w_row - 1``.

    Zero LLRs count on the positive side.  With no negative mass the ratio is
    ``+inf``; if both sides are infinite it is NaN and the test fails, since an
    LLR of ``-inf`` already defeats the all-zeros word.
    """
    if w_row < 2:
        raise ValueError("w_row must be at least 2")
    gamma = np.asarray(gamma, dtype=float)
    if np.any(np.isnan(gamma)):
        raise ValueError("LLRs must not be NaN")
    nonneg = gamma >= 0
    pos = math.fsum(gamma[nonneg])
    neg = -math.fsum(gamma[~nonneg])
    if neg == 0:
        ratio = math.inf
    elif math.isinf(neg):
        ratio = math.nan if math.isinf(pos) else 0.0
    else:
        ratio = pos / neg
    passes = bool(ratio >= w_row - 1)
    if math.isfinite(pos) and 0 < neg < math.inf and abs(pos - (w_row - 1) * neg) <= 1e-9 * pos:
        # decide near-ties on the exact sums of the given floats
        exact_pos = sum(map(Fraction, gamma[nonneg]), Fraction(0))
        exact_neg = -sum(map(Fraction, gamma[~nonneg]), Fraction(0))
        passes = exact_pos >= (w_row - 1) * exact_neg
    return RatioReport(pos, neg, ratio, passes)


def asymptotic_condition(ch: ChannelModel, w_row: int) -> Bound0Report:
    """Moment ratio ``E[G; G >= 0] / -E[G; G < 0]`` against ``w_row - 1``."""
    if w_row < 2:
        raise ValueError("w_row must be at least 2")
    target = w_row - 1
    if ch.kind == channels.BSC:
        eps = Fraction(ch.epsilon)
        # the BSC ratio is (1-eps)/eps exactly (or its inverse above 1/2)
        exact = (1 - eps) / eps if eps <= Fraction(1, 2) else eps / (1 - eps)
        lhs = float(exact)
        holds, boundary = exact >= target, exact == target
        return Bound0Report(ch.describe(), w_row, lhs, holds, boundary, eps_ub=bsc_threshold_ub(w_row))
    neg = channels.negative_moment(ch)
    pos = channels.positive_moment(ch)
    lhs = math.inf if neg == 0 else float(pos / neg)
    sigma_ub = None
    if ch.kind == channels.AWGNC and w_row >= 3:
        sigma_ub = awgn_threshold_ub(w_row, ch.Ec)[0]
    return Bound0Report(ch.describe(), w_row, lhs, bool(lhs >= target), bool(lhs == target), sigma_ub=sigma_ub)


def bsc_threshold_ub(w_row: int) -> Fraction:
    """Largest BSC crossover probability that survives the sign-only test: ``1/w_row``."""
    if w_row < 2:
        raise ValueError("w_row must be at least 2")
    return Fraction(1, w_row)


def bsc_threshold_ub_sequence(w_rows: Iterable[int]) -> list[Fraction]:
    """Per-``n`` bounds for code families whose row weight grows with ``n``."""
    return [bsc_threshold_ub(w) for w in w_rows]


# --- AWGNC ------------------------------------------------------------------


def _ratio_closed(t: float) -> float:
    # the moment ratio depends on sigma only through t = sqrt(Ec)/sigma
    ch = ChannelModel.awgn(1.0 / (t * t))
    neg = channels.negative_moment(ch)
    return math.inf if neg == 0 else channels.positive_moment(ch) / neg


def _ratio_quad(t: float) -> float:
    pos, neg = channels.partial_moments_quad(ChannelModel.awgn(1.0 / (t * t)))
    return math.inf if neg <= 0 else pos / neg


class _EmpiricalRatio:
    """Sample version of the ratio from one sorted batch of standard normals."""

    def __init__(self, n: int, seed):
        z = np.sort(np.random.default_rng(seed).standard_normal(n))
        self.z = z
        self.csum = np.concatenate([[0.0], np.cumsum(z)])

    def __call__(self, t: float) -> float:
        # LLR / sd = t + Z
        n = self.z.size
        k = int(np.searchsorted(self.z, -t, side="left"))
        neg = -(k * t + self.csum[k])
        pos = (n - k) * t + (self.csum[n] - self.csum[k])
        return math.inf if neg <= 0 else pos / neg


def awgn_threshold_ub(
    w_row: int,
    Ec: float = 1.0,
    method: str = "closed",
    *,
    n_samples: int = MC_SAMPLES,
    seed: int = 0,
    xtol: float = SIGMA_XTOL,
) -> tuple[float, float]:
    """Noise level ``sigma*`` where the moment ratio equals ``w_row - 1``.

    Returns ``(sigma*, Ec / sigma*^2)``.  ``method`` picks how the partial
    moments are evaluated: ``closed`` (default), ``quad`` (adaptive
    quadrature) or ``mc`` (empirical moments of ``n_samples`` draws).
    """
    if w_row < 3:
        raise ValueError("w_row must be at least 3; for w_row = 2 the condition never binds")
    if not Ec > 0:
        raise ValueError("Ec must be positive")
    if method == "closed":
        ratio = _ratio_closed
    elif method == "quad":
        ratio = _ratio_quad
    elif method == "mc":
        ratio = _EmpiricalRatio(n_samples, seed)
    else:
        raise ValueError(f"unknown method {method!r}")
    target = w_row - 1
    root_ec = math.sqrt(Ec)

    def f(sigma: float) -> float:
        r = ratio(root_ec / sigma)
        return 1.0 if math.isinf(r) else r - target

    lo, hi = SIGMA_BRACKET
    if not (f(lo) > 0 > f(hi)):
        raise RuntimeError(f"sigma bracket {SIGMA_BRACKET} does not enclose the root")
    sigma = optimize.bisect(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)
    return sigma, Ec / sigma**2


# --- figure data ------------------------------------------------------------


class Fig1Row(NamedTuple):
    w_col: int
    w_row: int
    rate: float
    eps_ub: float


class Fig2Row(NamedTuple):
    q: int
    n: int
    rate: float
    eps_ub: float


def default_fig1_pairs() -> list[tuple[int, int]]:
    return [(wc, wr) for wc in FIG1_WCOL for wr in range(wc + 1, FIG1_WROW_MAX + 1)]


def fig1_data(pairs=None) -> list[Fig1Row]:
    """Design rate ``1 - w_col/w_row`` and ``1/w_row`` for each regular family."""
    pairs = default_fig1_pairs() if pairs is None else list(pairs)
    rows = []
    for wc, wr in pairs:
        if not 1 <= wc < wr:
            raise ValueError(f"need 1 <= w_col < w_row, got ({wc}, {wr})")
        rows.append(Fig1Row(wc, wr, 1 - wc / wr, float(bsc_threshold_ub(wr))))
    return rows


def fig2_data(s_list: Iterable[int]) -> list[Fig2Row]:
    """Rate and sign-only bound of the PG(2, 2^s) codes (row weight ``q + 1``)."""
    rows = []
    for s in s_list:
        if s < 1:
            raise ValueError("s must be positive")
        q = 2**s
        rows.append(Fig2Row(q, q * q + q + 1, pg2q_rate(s), float(bsc_threshold_ub(q + 1))))
    return rows


def bsc_capacity(eps) -> np.ndarray:
    """``1 - h2(eps)`` in bits."""
    eps = np.asarray(eps, dtype=float)
    return 1.0 - (entr(eps) + entr(1.0 - eps)) / math.log(2)


def capacity_curve(points: int = 101) -> tuple[np.ndarray, np.ndarray]:
    eps = np.linspace(0.0, 0.5, points)
    return eps, bsc_capacity(eps)

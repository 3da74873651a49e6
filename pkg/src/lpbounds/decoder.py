"""LP decoding, block-error detection, and a brute-force ML reference."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .codes import Code
from .geometry import LinearSystem, polytope_inequalities
from .gf2 import nullspace_basis
from .lp import OPTIMAL, UNBOUNDED, LpProblem, solve_lp

STAGE1_TOL = 1e-7
MARGIN_TOL = 1e-9
INTEGRAL_TOL = 1e-6
ML_MAX_DIM = 24


class DecoderError(RuntimeError):
    """The underlying LP solve did not finish with an optimum."""


@dataclass
class DecodeResult:
    """Outcome of one LP decode.

    ``all_zeros_unique`` says whether the reference codeword (all-zeros
    unless another was passed to :func:`lp_decode`) is the unique optimum;
    ``error_event`` is its negation.
    """

    omega_hat: np.ndarray
    objective: float
    integral: bool
    all_zeros_unique: bool
    error_event: bool

    def to_record(self, include_omega: bool = False) -> dict:
        rec = {
            "objective": _json_float(self.objective),
            "integral": self.integral,
            "error_event": self.error_event,
        }
        if include_omega:
            rec["omega"] = [_json_float(v) for v in self.omega_hat]
        return rec


def _json_float(v: float):
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(f"{v:.9g}")


@lru_cache(maxsize=64)
def _odd_subset_rows(code: Code) -> LinearSystem:
    # box constraints are passed as variable bounds instead
    full = polytope_inequalities(code)
    keep = range(2 * code.n, len(full))
    rows = list(full)
    return LinearSystem.from_rows(code.n, (rows[k] for k in keep))


def cone_margin(code: Code, cost, active=None) -> float:
    """``min cost.w`` over ``{w in K : sum(w) = 1, w_i = 0 off active}``.

    Solved through its dual, ``max t`` s.t. ``t - (A^T lam)_i <= cost_i`` with
    ``lam >= 0`` ranging over the cone rows, which starts from a feasible,
    non-degenerate basis.  Returns ``+inf`` when only ``w = 0`` is left.
    """
    cost = np.asarray(cost, dtype=float)
    active = np.ones(code.n, bool) if active is None else np.asarray(active, bool)
    idx = np.flatnonzero(active)
    if idx.size == 0:
        return math.inf
    local = -np.ones(code.n, dtype=np.int64)
    local[idx] = np.arange(idx.size)
    # one dual variable per cone row (j, i') with i' active; its row a has
    # +1 at i' and -1 at the other active members of I_j
    entries: list[list[tuple[int, float]]] = [[] for _ in idx]
    n_dual = 2
    for r in code.rows:
        members = local[r]
        members = members[members >= 0]
        for piv in members:
            for i in members:
                entries[i].append((n_dual, -1.0 if i == piv else 1.0))
            n_dual += 1
    c = cost[idx]
    shift = float(c.min())
    rows = []
    for i, ent in enumerate(entries):
        rows.append(([0, 1] + [k for k, _ in ent], [1.0, -1.0] + [v for _, v in ent], "<=", c[i] - shift))
    objective = np.zeros(n_dual)
    objective[0], objective[1] = -1.0, 1.0
    sol = solve_lp(LpProblem(objective, LinearSystem.from_rows(n_dual, rows)))
    if sol.status == UNBOUNDED:
        return math.inf
    if sol.status != OPTIMAL:
        raise DecoderError(f"cone LP ended with status {sol.status}")
    return shift - sol.value


def lp_decode(code: Code, gamma, reference=None) -> DecodeResult:
    """Minimise ``sum_i gamma_i w_i`` over the fundamental polytope.

    Infinite LLRs fix their variable (``+inf`` -> 0, ``-inf`` -> 1) before the
    solve.  The reference codeword (all-zeros by default) is the unique
    optimum iff the cost is strictly positive on every nonzero direction of
    the tangent cone of the polytope at it; that cone is the fundamental cone
    with coordinates flipped on the reference support, so a second LP over
    ``K`` decides uniqueness.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (code.n,):
        raise ValueError(f"expected {code.n} LLRs, got shape {gamma.shape}")
    if np.any(np.isnan(gamma)):
        raise ValueError("LLRs must not be NaN")
    ref = np.zeros(code.n) if reference is None else np.asarray(reference, dtype=float)
    flip = np.where(ref > 0.5, -1.0, 1.0)

    pos_inf, neg_inf = gamma == np.inf, gamma == -np.inf
    lower = np.where(neg_inf, 1.0, 0.0)
    upper = np.where(pos_inf, 0.0, 1.0)
    cost = np.where(np.isinf(gamma), 0.0, gamma)

    sol = solve_lp(LpProblem(cost, _odd_subset_rows(code), lower=lower, upper=upper))
    if sol.status != OPTIMAL:
        raise DecoderError(f"LP decode ended with status {sol.status}")
    omega = sol.point
    integral = bool(np.all(np.minimum(np.abs(omega), np.abs(omega - 1)) <= INTEGRAL_TOL))
    objective = -math.inf if neg_inf.any() else sol.value

    fixed = pos_inf | neg_inf
    ref_consistent = not np.any((pos_inf & (ref > 0.5)) | (neg_inf & (ref < 0.5)))
    ref_cost = float(cost @ ref)
    if not ref_consistent or sol.value < ref_cost - STAGE1_TOL:
        unique = False
    else:
        margin = cone_margin(code, flip * cost, active=~fixed)
        scale = max(1.0, float(np.max(np.abs(cost), initial=0.0)))
        unique = margin > MARGIN_TOL * scale
    return DecodeResult(omega, objective, integral, unique, not unique)


def _ml_chunks(G: np.ndarray, chunk_bits: int = 14):
    k = G.shape[0]
    low = min(k, chunk_bits)
    low_coeffs = ((np.arange(1 << low)[:, None] >> np.arange(low)[None, :]) & 1).astype(np.int64)
    low_words = (low_coeffs @ G[:low].astype(np.int64)) & 1
    for hi in range(1 << (k - low)):
        offset = np.zeros(G.shape[1], dtype=np.int64)
        for b in range(k - low):
            if (hi >> b) & 1:
                offset ^= G[low + b].astype(np.int64)
        yield (low_words ^ offset).astype(np.uint8)


def ml_decode_bruteforce(code: Code, gamma, max_dim: int = ML_MAX_DIM) -> tuple[np.ndarray, float]:
    """Cheapest codeword by exhaustive enumeration; ties go to the lexicographically smallest."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (code.n,):
        raise ValueError(f"expected {code.n} LLRs, got shape {gamma.shape}")
    G = nullspace_basis(code.H)
    if G.shape[0] > max_dim:
        raise ValueError(f"code dimension {G.shape[0]} exceeds enumeration cap {max_dim}")
    finite = np.where(np.isinf(gamma), 0.0, gamma)
    pos_inf, neg_inf = gamma == np.inf, gamma == -np.inf
    best_word, best_cost = None, math.inf
    for words in _ml_chunks(G):
        costs = words @ finite
        hit_pos = words[:, pos_inf].any(axis=1)
        hit_neg = words[:, neg_inf].any(axis=1)
        if np.any(hit_pos & hit_neg):
            raise ValueError("codeword with both +inf and -inf LLRs has undefined cost")
        costs = np.where(hit_pos, np.inf, np.where(hit_neg, -np.inf, costs))
        lo = costs.min()
        if best_word is None or lo < best_cost - _tie_tol(best_cost):
            best_word, best_cost = None, lo
        elif lo > best_cost + _tie_tol(best_cost):
            continue
        ties = words[costs <= best_cost + _tie_tol(best_cost)]
        cand = ties[np.lexsort(ties.T[::-1])[0]]
        if best_word is None or tuple(cand) < tuple(best_word):
            best_word = cand
    return best_word.copy(), float(best_cost)


def _tie_tol(c: float) -> float:
    return 0.0 if math.isinf(c) else 1e-12 * (1 + abs(c))


def read_llr_file(path) -> np.ndarray:
    """JSON array of numbers, with ``"inf"`` / ``"-inf"`` strings for infinities."""
    with open(path) as f:
        data = json.load(f)
    if not isinstance(data, list):
        raise ValueError("LLR file must hold a JSON array")
    out = []
    for v in data:
        if isinstance(v, str):
            if v.strip().lower() not in ("inf", "+inf", "-inf"):
                raise ValueError(f"bad LLR entry {v!r}")
            out.append(-math.inf if v.strip().startswith("-") else math.inf)
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(float(v))
        else:
            raise ValueError(f"bad LLR entry {v!r}")
    return np.array(out)

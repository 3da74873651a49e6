"""Threshold bounds from assignments that look at the whole 2-neighborhood.

On a Tanner graph of girth at least six, the LLR signs within distance two of
variable ``i`` are summarised, up to graph automorphism, by the sign of
``gamma_i`` and the multiset of negative counts among the ``w_row - 1`` other
variables of each of its ``w_col`` checks.  Each such orbit gets one value
``alpha``; putting ``omega_i = alpha(orbit of i)`` must land in the
fundamental cone for every sign pattern, and the expected cost per symbol is
``sum_orbits p * gamma_center * alpha``.  The smallest BSC crossover where
that minimum turns negative bounds the LP decoding threshold from above.

Two constraint systems describe the same feasible set of ``alpha``:

``aux``
    For each check value ``c`` and sign ``s`` an auxiliary ``mu(s, c)`` is
    bounded by every ``alpha`` whose orbit has sign ``s`` and a branch with
    count ``c``; the cone inequality at a check where the pivot sees ``k``
    negatives then only needs ``k * mu(-, .) + (w_row - 1 - k) * mu(+, .)``.
    Because ``mu`` enters with positive coefficients this is an exact
    projection of the exhaustive system.  It stays small for every pair.
``exhaustive``
    One inequality per joint configuration of a check and pivot, for
    cross-checking at small sizes.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .codes import Code
from .geometry import LinearSystem
from .lp import OPTIMAL, UNBOUNDED, LpProblem, LpSolution, solve_lp

ORBIT_CAP = 10**5
JOINT_CLASS_CAP = 10**7
NEG_THRESHOLD = -1e-9
GRID_POINTS = 32
DEFAULT_TOL = 1e-4

PLUS, MINUS = 1, -1


@dataclass(frozen=True)
class PatternOrbit:
    """Sign of the center LLR and the sorted negative counts of its branches."""

    center_sign: int
    branch_counts: tuple[int, ...]
    orbit_index: int
    multiplicity: int


def orbit_count(w_col: int, w_row: int) -> int:
    return 2 * math.comb(w_col + w_row - 1, w_col)


def type_count(w_col: int, w_row: int) -> int:
    """Number of (sign, other-branch multiset) types of a variable seen from one check."""
    return 2 * math.comb(w_col + w_row - 2, w_col - 1)


def joint_class_count(w_col: int, w_row: int) -> int:
    t = type_count(w_col, w_row)
    return math.comb(t + w_row - 1, w_row)


def _multinomial(counts) -> int:
    out = math.factorial(len(counts))
    for k in Counter(counts).values():
        out //= math.factorial(k)
    return out


def _check_pair(w_col: int, w_row: int) -> None:
    if w_col < 1 or w_row < 2:
        raise ValueError(f"need w_col >= 1 and w_row >= 2, got ({w_col}, {w_row})")


@lru_cache(maxsize=None)
def _orbits(w_col: int, w_row: int) -> tuple[PatternOrbit, ...]:
    out = []
    for sign in (PLUS, MINUS):
        for counts in itertools.combinations_with_replacement(range(w_row), w_col):
            out.append(PatternOrbit(sign, counts, len(out), _multinomial(counts)))
    return tuple(out)


def enumerate_orbits(w_col: int, w_row: int, cap: int = ORBIT_CAP) -> list[PatternOrbit]:
    """All orbits, positive center first, branch multisets in lexicographic order."""
    _check_pair(w_col, w_row)
    size = orbit_count(w_col, w_row)
    if size > cap:
        raise ValueError(f"{size} orbits exceed the cap {cap}")
    return list(_orbits(w_col, w_row))


@lru_cache(maxsize=None)
def orbit_index_map(w_col: int, w_row: int) -> dict[tuple[int, tuple[int, ...]], int]:
    return {(o.center_sign, o.branch_counts): o.orbit_index for o in _orbits(w_col, w_row)}


def reference_orbit(w_col: int, w_row: int) -> int:
    """Index of the all-negative pattern, whose value is normalised to 1."""
    return orbit_index_map(w_col, w_row)[(MINUS, (w_row - 1,) * w_col)]


def orbit_probability(orbit: PatternOrbit, eps, w_row: int):
    """Probability of the orbit under i.i.d. BSC(eps) signs.

    Exact when ``eps`` is a :class:`~fractions.Fraction`.
    """
    one = Fraction(1) if isinstance(eps, Fraction) else 1.0
    p = eps if orbit.center_sign == MINUS else one - eps
    p = p * orbit.multiplicity
    d = w_row - 1
    for c in orbit.branch_counts:
        p = p * math.comb(d, c) * eps**c * (one - eps) ** (d - c)
    return p


def orbit_probabilities(w_col: int, w_row: int, eps) -> np.ndarray:
    orbits = _orbits(w_col, w_row)
    dtype = object if isinstance(eps, Fraction) else float
    return np.array([orbit_probability(o, eps, w_row) for o in orbits], dtype=dtype)


# --- constraint systems -----------------------------------------------------


class ConeSystem(NamedTuple):
    """Cone constraints on the orbit values; variables past ``n_orbits`` are auxiliary."""

    system: LinearSystem
    n_orbits: int
    n_aux: int
    form: str


def _aux_index(n_orb: int, w_row: int, sign: int, c: int) -> int:
    return n_orb + (0 if sign == MINUS else w_row) + c


def _aux_rows(w_col: int, w_row: int):
    orbits = _orbits(w_col, w_row)
    n_orb = len(orbits)
    d = w_row - 1
    for o in orbits:
        for c in sorted(set(o.branch_counts)):
            # mu(s, c) <= alpha(o)
            yield [_aux_index(n_orb, w_row, o.center_sign, c), o.orbit_index], [1.0, -1.0], "<=", 0.0
    for o in orbits:
        shift = 1 if o.center_sign == MINUS else 0
        for k in sorted(set(o.branch_counts)):
            # the pivot sees k negatives among the other d variables of this check
            idx, val = [o.orbit_index], [1.0]
            if k > 0:
                idx.append(_aux_index(n_orb, w_row, MINUS, k - 1 + shift))
                val.append(-float(k))
            if d - k > 0:
                idx.append(_aux_index(n_orb, w_row, PLUS, k + shift))
                val.append(-float(d - k))
            yield idx, val, "<=", 0.0


def _exhaustive_rows(w_col: int, w_row: int):
    index = orbit_index_map(w_col, w_row)
    types = [
        (sign, rest)
        for sign in (PLUS, MINUS)
        for rest in itertools.combinations_with_replacement(range(w_row), w_col - 1)
    ]
    seen = set()
    for joint in itertools.combinations_with_replacement(range(len(types)), w_row):
        negatives = sum(types[t][0] == MINUS for t in joint)
        # a variable's count on this check excludes itself
        orb = []
        for t in joint:
            sign, rest = types[t]
            c = negatives - (sign == MINUS)
            orb.append(index[(sign, tuple(sorted(rest + (c,))))])
        tally = Counter(orb)
        for pivot in tally:
            if tally[pivot] > 1:
                continue  # the pivot's own value appears on the right: trivially true
            key = (pivot, tuple(sorted(orb)))
            if key in seen:
                continue
            seen.add(key)
            others = Counter(orb)
            others[pivot] -= 1
            idx = [pivot] + sorted(k for k in others if k != pivot and others[k])
            val = [1.0] + [-float(others[k]) for k in idx[1:]]
            yield idx, val, "<=", 0.0


def build_cone_constraints(
    w_col: int,
    w_row: int,
    form: str = "aux",
    nonneg: bool = True,
    cap: int = JOINT_CLASS_CAP,
) -> ConeSystem:
    """Cone inequalities every orbit assignment has to satisfy.

    ``nonneg`` appends explicit ``alpha >= 0`` rows (the LP path passes them as
    bounds instead).
    """
    _check_pair(w_col, w_row)
    n_orb = orbit_count(w_col, w_row)
    if form == "aux":
        n_aux = 2 * w_row
        rows = list(_aux_rows(w_col, w_row))
    elif form == "exhaustive":
        size = joint_class_count(w_col, w_row)
        if size > cap:
            raise ValueError(
                f"({w_col},{w_row}) needs {size} joint check configurations, above the cap {cap}"
            )
        n_aux = 0
        rows = list(_exhaustive_rows(w_col, w_row))
    else:
        raise ValueError(f"unknown constraint form {form!r}")
    if nonneg:
        rows.extend(([k], [1.0], ">=", 0.0) for k in range(n_orb))
    return ConeSystem(LinearSystem.from_rows(n_orb + n_aux, rows), n_orb, n_aux, form)


@lru_cache(maxsize=32)
def _cached_system(w_col: int, w_row: int, form: str) -> ConeSystem:
    return build_cone_constraints(w_col, w_row, form, nonneg=False)


# --- the LP -----------------------------------------------------------------


def bsc_G(eps) -> float:
    return math.log((1 - float(eps)) / float(eps))


def bound2_objective_min(
    w_col: int,
    w_row: int,
    eps,
    restrict_sign_only: bool = False,
    form: str = "aux",
    exact: bool = False,
) -> LpSolution:
    """Minimum expected cost per symbol over valid orbit assignments.

    The cost is ``sum_o p_o * (+-G) * alpha_o`` with the all-negative orbit
    pinned to 1.  In exact mode ``eps`` should be a ``Fraction`` and the
    (irrational) factor ``G`` is left out, so only the sign of the value is
    comparable with the float result.  ``restrict_sign_only`` ties every orbit
    to the value of its center sign class.
    """
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    cs = _cached_system(w_col, w_row, form)
    n_orb, n_var = cs.n_orbits, cs.n_orbits + cs.n_aux
    orbits = _orbits(w_col, w_row)
    if exact:
        eps = Fraction(eps)
        p = orbit_probabilities(w_col, w_row, eps)
        cost = [p[o.orbit_index] * o.center_sign for o in orbits] + [Fraction(0)] * cs.n_aux
        system = _exact_copy(cs.system)
    else:
        G = bsc_G(eps)
        p = orbit_probabilities(w_col, w_row, float(eps))
        cost = np.zeros(n_var)
        cost[:n_orb] = p * G * np.array([o.center_sign for o in orbits])
        system = cs.system
    ref = reference_orbit(w_col, w_row)
    lower = np.zeros(n_var)
    upper = np.full(n_var, np.inf)
    lower[ref] = upper[ref] = 1.0
    equalities = None
    if restrict_sign_only:
        first_plus = next(o.orbit_index for o in orbits if o.center_sign == PLUS)
        rows = []
        for o in orbits:
            rep = ref if o.center_sign == MINUS else first_plus
            if o.orbit_index != rep:
                rows.append(([o.orbit_index, rep], [1, -1], "==", 0))
        if exact:
            rows = [(i, [Fraction(v) for v in c], s, Fraction(b)) for i, c, s, b in rows]
        equalities = LinearSystem.from_rows(n_var, rows)
    if form == "exhaustive":
        if exact:
            raise ValueError("exact mode is only available for the aux form")
        return _cutting_planes(cost, system, equalities, lower, upper)
    return solve_lp(LpProblem(cost, system, equalities, lower, upper, exact=exact))


CUT_BOX = 1e6
CUT_BATCH = 200
CUT_TOL = 1e-9


def _cutting_planes(cost, system, equalities, lower, upper) -> LpSolution:
    """Solve over ``system`` by adding its most violated rows a batch at a time.

    A temporary box ``x <= CUT_BOX`` keeps the partial problems bounded; a
    final optimum that touches the box is reported as unbounded.
    """
    A = system.matrix()
    b = system.rhs.astype(float)
    box = np.minimum(upper, CUT_BOX)
    rows = list(system)
    active: list[int] = []
    pivots = 0
    while True:
        part = LinearSystem.from_rows(system.n_vars, (rows[k] for k in active)) if active else None
        sol = solve_lp(LpProblem(cost, part, equalities, lower, box))
        pivots += sol.iterations
        if sol.status != OPTIMAL:
            return LpSolution(sol.status, iterations=pivots)
        viol = A @ sol.point - b
        bad = np.flatnonzero(viol > CUT_TOL)
        if bad.size == 0:
            break
        bad = bad[np.argsort(-viol[bad], kind="stable")][:CUT_BATCH]
        active.extend(int(k) for k in bad)
    if np.any(sol.point[np.isinf(upper)] >= CUT_BOX * (1 - 1e-9)):
        return LpSolution(UNBOUNDED, iterations=pivots)
    return LpSolution(OPTIMAL, sol.value, sol.point, pivots)


def _exact_copy(system: LinearSystem) -> LinearSystem:
    rows = ((r.indices, [Fraction(v) for v in r.coeffs], r.sense, Fraction(r.rhs)) for r in system)
    return LinearSystem.from_rows(system.n_vars, rows)


def is_negative(sol: LpSolution) -> bool:
    """The LP certifies a valid assignment with negative expected cost."""
    if sol.status == UNBOUNDED:
        return True
    if sol.status != OPTIMAL:
        raise RuntimeError(f"2-neighborhood LP ended with status {sol.status}")
    return sol.value < NEG_THRESHOLD


@dataclass(frozen=True)
class Bound2Report:
    w_col: int
    w_row: int
    eps_ub2: float
    lp_sizes: tuple[int, int]
    restricted_eps: float
    monotone: bool
    evaluations: int

    def to_record(self) -> dict:
        return {
            "w_col": self.w_col,
            "w_row": self.w_row,
            "eps_ub2": float(f"{self.eps_ub2:.9g}"),
            "eps_ub0": float(f"{1 / self.w_row:.9g}"),
            "lp_variables": self.lp_sizes[0],
            "lp_constraints": self.lp_sizes[1],
            "restricted_eps": float(f"{self.restricted_eps:.9g}"),
            "monotone_on_grid": self.monotone,
            "lp_evaluations": self.evaluations,
        }


def _threshold(neg, lo: float, hi: float, tol: float, workers: int) -> tuple[float, bool, int]:
    """Smallest eps in ``[lo, hi]`` (to ``tol``) with ``neg(eps)``; ``neg(hi)`` must hold."""
    grid = np.linspace(lo, hi, GRID_POINTS)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            flags = list(pool.map(neg, grid))
    else:
        flags = [neg(e) for e in grid]
    evals = len(grid)
    if not flags[-1]:
        raise RuntimeError(f"objective is not negative at the upper end eps = {hi}")
    if flags[0]:
        return float(lo), True, evals
    first = flags.index(True)
    monotone = all(flags[first:])
    if monotone:
        a, b = float(grid[first - 1]), float(grid[first])
        while b - a > tol:
            mid = 0.5 * (a + b)
            evals += 1
            if neg(mid):
                b = mid
            else:
                a = mid
        return b, True, evals
    # non-monotone on the grid: scan upward at resolution tol
    e = lo
    while e < hi:
        evals += 1
        if neg(e):
            return float(e), False, evals
        e += tol
    return float(hi), False, evals


def bsc_threshold_ub2(
    w_col: int,
    w_row: int,
    tol: float = DEFAULT_TOL,
    form: str = "aux",
    workers: int = 1,
) -> Bound2Report:
    """Infimum (to within ``tol``) of the BSC crossovers where the 2-neighborhood LP is negative."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    cs = _cached_system(w_col, w_row, form)
    # the sign-only assignment is feasible, so the objective is negative just above 1/w_row
    hi = min(1 / w_row + tol / 4, 0.5 - 1e-12)
    lo = min(tol, hi / 2)

    def neg(e):
        return is_negative(bound2_objective_min(w_col, w_row, float(e), form=form))

    def neg_restricted(e):
        return is_negative(bound2_objective_min(w_col, w_row, float(e), True, form=form))

    eps2, monotone, evals = _threshold(neg, lo, hi, tol, workers)
    restricted, _, _ = _threshold(neg_restricted, lo, hi, tol, workers)
    sizes = (cs.system.n_vars, len(cs.system))
    return Bound2Report(w_col, w_row, eps2, sizes, restricted, monotone, evals)


class Fig3Row(NamedTuple):
    w_col: int
    w_row: int
    rate: float
    eps_ub0: float
    eps_ub2: float


def fig3_data(pairs, tol: float = DEFAULT_TOL, workers: int = 1) -> list[Fig3Row]:
    """``(rate, 1/w_row, eps_ub2)`` per pair, sorted by rate."""
    rows = []
    for wc, wr in pairs:
        if not 1 <= wc < wr:
            raise ValueError(f"need 1 <= w_col < w_row, got ({wc}, {wr})")
        rep = bsc_threshold_ub2(wc, wr, tol, workers=workers)
        rows.append(Fig3Row(wc, wr, 1 - wc / wr, 1 / wr, rep.eps_ub2))
    rows.sort(key=lambda r: (r.rate, r.w_col, r.w_row))
    return rows


# --- expanding an assignment onto a concrete graph --------------------------


def variable_orbits(code: Code, gamma, w_col: int, w_row: int) -> np.ndarray:
    """Orbit index of each variable's realised 2-neighborhood sign pattern."""
    gamma = np.asarray(gamma, dtype=float)
    negative = (gamma < 0).astype(np.int64)
    row_neg = np.array([negative[r].sum() for r in code.rows])
    index = orbit_index_map(w_col, w_row)
    out = np.empty(code.n, dtype=np.int64)
    for i in range(code.n):
        checks = code.cols[i]
        if len(checks) != w_col:
            raise ValueError(f"variable {i} has degree {len(checks)}, expected {w_col}")
        counts = tuple(sorted(int(c) for c in row_neg[checks] - negative[i]))
        out[i] = index[(MINUS if negative[i] else PLUS, counts)]
    return out


def expand_assignment(code: Code, gamma, alpha, w_col: int, w_row: int) -> np.ndarray:
    """``omega_i = alpha(orbit of i)``."""
    alpha = np.asarray(alpha, dtype=float)
    return alpha[variable_orbits(code, gamma, w_col, w_row)]

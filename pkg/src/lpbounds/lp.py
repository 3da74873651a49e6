"""Dense-tableau two-phase primal simplex.

Problems are stated as ``min c.x`` subject to a :class:`LinearSystem` of
inequalities, optional equalities and per-variable bounds.  With
``exact=True`` the tableau holds :class:`fractions.Fraction` entries and all
tolerances are zero.  The float tableau is rebuilt from the original rows
every ``REFACTOR_EVERY`` pivots and again before optimality is declared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .geometry import LinearSystem

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"
ITERATION_LIMIT = "iteration_limit"

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
MAX_PIVOTS = 10**6
REFACTOR_EVERY = 400
DEGENERATE_STREAK = 1


@dataclass
class LpProblem:
    """``min objective . x`` s.t. ``constraints``, ``equalities``, ``lower <= x <= upper``."""

    objective: np.ndarray
    constraints: LinearSystem | None = None
    equalities: LinearSystem | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    exact: bool = False

    def __post_init__(self):
        if self.exact:
            self.objective = np.array([Fraction(v) for v in self.objective], dtype=object)
        else:
            self.objective = np.asarray(self.objective, dtype=float)
            if not np.all(np.isfinite(self.objective)):
                raise ValueError("objective coefficients must be finite")
        n = self.n_vars
        for sys_ in (self.constraints, self.equalities):
            if sys_ is not None and sys_.n_vars != n:
                raise ValueError("constraint system has the wrong dimension")
        if self.equalities is not None and any(s != "==" for s in self.equalities.senses):
            raise ValueError("equalities must use '=='")
        self.lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float)
        self.upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float)
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise ValueError("bounds have the wrong shape")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")

    @property
    def n_vars(self) -> int:
        return len(self.objective)


@dataclass
class LpSolution:
    status: str
    value: float | None = None
    point: np.ndarray | None = None
    iterations: int = 0
    pivots: list[tuple[int, int]] = field(default_factory=list, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Rows ``[A | b]`` followed by the reduced-cost row ``[d | -z]``."""

    def __init__(self, T: np.ndarray, basis: list[int], exact: bool, max_pivots: int, rule: str):
        self.T = T
        self.rule = rule
        self.basis = basis
        self.exact = exact
        self.tol = 0 if exact else OPT_TOL
        self.max_pivots = max_pivots
        self.pivots: list[tuple[int, int]] = []
        # original rows and current-phase costs, kept for refactorization
        self.A0 = None
        self.cost = None

    def set_phase(self, A0: np.ndarray | None, cost: np.ndarray | None) -> None:
        if not self.exact:
            self.A0, self.cost = A0, cost

    def refactor(self) -> None:
        """Rebuild the tableau from the original rows and the current basis."""
        if self.exact or self.cost is None:
            return
        T = self.T
        B = self.A0[:, self.basis]
        try:
            T[:-1] = np.linalg.solve(B, self.A0)
        except np.linalg.LinAlgError:
            return
        T[:-1, self.basis] = np.eye(len(self.basis))
        rhs = T[:-1, -1]
        rhs[(rhs < 0) & (rhs > -FEAS_TOL)] = 0.0
        T[-1] = self.cost - self.cost[self.basis].dot(T[:-1])

    def pivot(self, r: int, c: int) -> None:
        T = self.T
        T[r] = T[r] / T[r, c]
        col = T[:, c].copy()
        col[r] = 0
        nz = np.flatnonzero(col != 0)
        # the pivot row is usually sparse, so only its nonzero columns change
        nzc = np.flatnonzero(T[r] != 0)
        T[np.ix_(nz, nzc)] -= np.outer(col[nz], T[r, nzc])
        if not self.exact:
            T[nz, c] = 0.0
            rhs = T[:-1, -1]
            rhs[(rhs < 0) & (rhs > -FEAS_TOL)] = 0.0
        self.basis[r] = c
        self.pivots.append((r, c))

    def run(self, allowed: int) -> str:
        """Primal iterations with entering columns restricted to ``< allowed``.

        ``bland``: lowest-index improving column, lowest-index leaving basic
        variable on ratio ties.  ``dantzig``: most negative reduced cost, but
        Bland's choice whenever the previous pivot was degenerate, which rules
        out cycling.
        """
        T, tol = self.T, self.tol
        streak = DEGENERATE_STREAK
        since_refactor = 0
        while True:
            d = T[-1, :allowed]
            cand = np.flatnonzero(d < -tol)
            if cand.size == 0 and since_refactor:
                # confirm optimality on a freshly factored tableau
                self.refactor()
                since_refactor = 0
                cand = np.flatnonzero(d < -tol)
            if cand.size == 0:
                return OPTIMAL
            if self.cost is not None and since_refactor >= REFACTOR_EVERY:
                self.refactor()
                since_refactor = 0
                continue
            if len(self.pivots) >= self.max_pivots:
                return ITERATION_LIMIT
            if self.rule == "bland" or streak >= DEGENERATE_STREAK:
                c = int(cand[0])
            else:
                c = int(cand[np.argmin(d[cand])])
            col = T[:-1, c]
            rows = np.flatnonzero(col > tol)
            if rows.size == 0:
                return UNBOUNDED
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            if self.exact:
                ties = rows[ratios == best]
            else:
                ties = rows[ratios <= best + 1e-12 * (1 + abs(best))]
            r = min(ties, key=lambda i: self.basis[i])
            streak = streak + 1 if best <= tol else 0
            self.pivot(int(r), c)
            since_refactor += 1


def _standard_form(p: LpProblem):
    """Substitute ``x = shift + M z`` with ``z >= 0``; upper bounds become rows."""
    n = p.n_vars
    dtype = object if p.exact else float
    conv = Fraction if p.exact else float
    signs: list[tuple[int, int]] = []
    shift = np.array([conv(0)] * n, dtype=dtype)
    ub_rows = []
    for i in range(n):
        lo, hi = p.lower[i], p.upper[i]
        if math.isfinite(lo):
            shift[i] = conv(lo)
            signs.append((i, 1))
            if math.isfinite(hi):
                ub_rows.append((len(signs) - 1, conv(hi) - conv(lo)))
        elif math.isfinite(hi):
            shift[i] = conv(hi)
            signs.append((i, -1))
        else:
            signs.extend([(i, 1), (i, -1)])
    nz = len(signs)
    M = np.zeros((n, nz), dtype=dtype)
    if p.exact:
        M[:] = Fraction(0)
    for k, (i, s) in enumerate(signs):
        M[i, k] = conv(s)

    blocks, senses, rhs = [], [], []
    for sys_ in (p.constraints, p.equalities):
        if sys_ is None or len(sys_) == 0:
            continue
        A, sn, b = sys_.to_dense()
        if p.exact:
            A = np.vectorize(Fraction, otypes=[object])(A)
            b = np.vectorize(Fraction, otypes=[object])(b)
        blocks.append(A.dot(M))
        rhs.extend(b - A.dot(shift))
        senses.extend(sn)
    if ub_rows:
        U = np.zeros((len(ub_rows), nz), dtype=dtype)
        if p.exact:
            U[:] = Fraction(0)
        for r, (k, width) in enumerate(ub_rows):
            U[r, k] = conv(1)
            rhs.append(width)
        blocks.append(U)
        senses.extend(["<="] * len(ub_rows))
    A = np.vstack(blocks) if blocks else np.zeros((0, nz), dtype=dtype)
    c = p.objective.dot(M)
    c0 = p.objective.dot(shift)
    return A, senses, np.array(rhs, dtype=dtype), c, c0, M, shift


def solve_lp(p: LpProblem, max_pivots: int = MAX_PIVOTS, rule: str = "dantzig") -> LpSolution:
    """Solve ``p`` by the two-phase simplex method (see :meth:`_Tableau.run` for pivoting).

    Statuses are ``optimal``, ``unbounded``, ``infeasible`` and, once
    ``max_pivots`` pivots have been spent, ``iteration_limit``.  The pivot
    sequence is a deterministic function of the input.
    """
    A, senses, b, c, c0, M, shift = _standard_form(p)
    exact = p.exact
    dtype = object if exact else float
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
    m, nz = A.shape

    # normalise to b >= 0; zero-rhs '>=' rows flip too so they get a slack basis
    senses = list(senses)
    for i in range(m):
        if b[i] < 0 or (b[i] == 0 and senses[i] == ">="):
            A[i] = -A[i]
            b[i] = -b[i]
            senses[i] = {"<=": ">=", ">=": "<=", "==": "=="}[senses[i]]

    n_slack = sum(s != "==" for s in senses)
    n_art = sum(s != "<=" for s in senses)
    width = nz + n_slack + n_art
    T = np.zeros((m + 1, width + 1), dtype=dtype)
    if exact:
        T[:] = zero
    T[:m, :nz] = A
    T[:m, -1] = b
    basis = [0] * m
    s_col, a_col = nz, nz + n_slack
    art_rows = []
    for i, s in enumerate(senses):
        if s == "<=":
            T[i, s_col] = one
            basis[i] = s_col
            s_col += 1
        else:
            if s == ">=":
                T[i, s_col] = -one
                s_col += 1
            T[i, a_col] = one
            basis[i] = a_col
            art_rows.append(i)
            a_col += 1
    first_art = nz + n_slack
    T0 = T[:m].copy()

    if rule not in ("bland", "dantzig"):
        raise ValueError(f"unknown pivot rule {rule!r}")
    tab = _Tableau(T, basis, exact, max_pivots, rule)
    if art_rows:
        T[-1, :] = 0 if not exact else zero
        for i in art_rows:
            T[-1, :first_art] -= T[i, :first_art]
            T[-1, -1] -= T[i, -1]
        if not exact:
            art_cost = np.zeros(width + 1)
            art_cost[first_art:width] = 1.0
            tab.set_phase(T0, art_cost)
        status = tab.run(first_art)
        if status == ITERATION_LIMIT:
            return LpSolution(ITERATION_LIMIT, iterations=len(tab.pivots), pivots=tab.pivots)
        if -T[-1, -1] > (0 if exact else FEAS_TOL * max(1.0, float(np.max(np.abs(b.astype(float)), initial=0)))):
            return LpSolution(INFEASIBLE, iterations=len(tab.pivots), pivots=tab.pivots)
        # drive remaining artificials out of the basis, dropping redundant rows
        keep = []
        for i in range(m):
            if tab.basis[i] >= first_art:
                row = T[i, :first_art]
                cand = np.flatnonzero(np.abs(row) > (0 if exact else OPT_TOL))
                if cand.size:
                    tab.pivot(i, int(cand[0]))
                    keep.append(i)
            else:
                keep.append(i)
        keep_rows = keep + [m]
        T = T[keep_rows][:, list(range(first_art)) + [width]]
        tab.T = T
        tab.basis = [tab.basis[i] for i in keep]
    else:
        T = T[:, list(range(first_art)) + [width]]
        tab.T = T

    # phase II cost row
    full_c = np.zeros(first_art, dtype=dtype)
    if exact:
        full_c[:] = zero
    full_c[:nz] = c
    cb = full_c[tab.basis]
    T[-1, :first_art] = full_c - cb.dot(T[:-1, :first_art])
    T[-1, -1] = -cb.dot(T[:-1, -1])
    if not exact:
        cols = list(range(first_art)) + [width]
        rows_kept = keep if art_rows else list(range(m))
        cost_row = np.zeros(first_art + 1)
        cost_row[:first_art] = full_c
        tab.set_phase(T0[rows_kept][:, cols], cost_row)
    status = tab.run(first_art)
    if status != OPTIMAL:
        return LpSolution(status, iterations=len(tab.pivots), pivots=tab.pivots)

    z = np.zeros(first_art, dtype=dtype)
    if exact:
        z[:] = zero
    for i, k in enumerate(tab.basis):
        z[k] = T[i, -1]
    x = shift + M.dot(z[:nz])
    value = p.objective.dot(x)
    if not exact:
        x = x.astype(float)
        value = float(value)
    return LpSolution(OPTIMAL, value, x, len(tab.pivots), tab.pivots)

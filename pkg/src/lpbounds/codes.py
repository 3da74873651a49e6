"""Parity-check matrices, their Tanner graphs, and the code families used here.

A :class:`Code` keeps two views of ``H``: per-row and per-column support
index arrays (the Tanner graph) and, lazily, the dense 0/1 matrix and packed
bit rows.  Every builder is deterministic given its seed.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import galois
from .gf2 import gf2_rank, pack_rows

ALL_ROWS_CAP = 10**6
PG_MAX_S = 5


@dataclass(frozen=True, eq=False)
class Code:
    """Binary parity-check matrix with Tanner-graph index sets.

    ``rows[j]`` is the sorted support of row ``j`` and ``cols[i]`` the sorted
    support of column ``i``.  ``w_col`` / ``w_row`` are set only when every
    column (row) has the same weight.
    """

    n: int
    rows: tuple[np.ndarray, ...]
    cols: tuple[np.ndarray, ...] = field(init=False)
    w_col: int | None = field(init=False)
    w_row: int | None = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("block length must be positive")
        if not self.rows:
            raise ValueError("a code needs at least one check")
        rows = []
        buckets: list[list[int]] = [[] for _ in range(self.n)]
        for j, r in enumerate(self.rows):
            r = np.unique(np.asarray(r, dtype=np.int64))
            if r.size == 0:
                raise ValueError(f"row {j} is all-zero")
            if r[0] < 0 or r[-1] >= self.n:
                raise ValueError(f"row {j} has an index outside [0, {self.n})")
            r.setflags(write=False)
            rows.append(r)
            for i in r:
                buckets[i].append(j)
        cols = []
        for b in buckets:
            c = np.asarray(b, dtype=np.int64)
            c.setflags(write=False)
            cols.append(c)
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "cols", tuple(cols))
        rw = {len(r) for r in rows}
        cw = {len(c) for c in cols}
        object.__setattr__(self, "w_row", rw.pop() if len(rw) == 1 else None)
        object.__setattr__(self, "w_col", cw.pop() if len(cw) == 1 else None)

    @classmethod
    def from_matrix(cls, H) -> "Code":
        H = np.asarray(H)
        if H.ndim != 2:
            raise ValueError("H must be a 2-D array")
        if not np.isin(H, (0, 1)).all():
            raise ValueError("H must be binary")
        return cls(H.shape[1], tuple(np.flatnonzero(row) for row in H))

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def is_regular(self) -> bool:
        return self.w_col is not None and self.w_row is not None

    @cached_property
    def H(self) -> np.ndarray:
        out = np.zeros((self.m, self.n), dtype=np.uint8)
        for j, r in enumerate(self.rows):
            out[j, r] = 1
        out.setflags(write=False)
        return out

    @cached_property
    def packed_rows(self) -> list[int]:
        return [sum(1 << int(i) for i in r) for r in self.rows]

    @cached_property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """(check index, variable index) arrays, grouped by check."""
        lengths = [len(r) for r in self.rows]
        checks = np.repeat(np.arange(self.m), lengths)
        vars_ = np.concatenate(self.rows)
        return checks, vars_

    def row_weights(self) -> np.ndarray:
        return np.array([len(r) for r in self.rows])

    def col_weights(self) -> np.ndarray:
        return np.array([len(c) for c in self.cols])

    def rank(self) -> int:
        return gf2_rank(self.packed_rows)

    def dimension(self) -> int:
        return self.n - self.rank()

    def __repr__(self) -> str:
        reg = f", ({self.w_col},{self.w_row})-regular" if self.is_regular else ""
        return f"Code(n={self.n}, m={self.m}{reg})"


# ---------------------------------------------------------------------------
# Builders


class _TannerGraph:
    """Mutable edge list used while repairing a configuration-model sample."""

    def __init__(self, ev: np.ndarray, ec: np.ndarray, n: int, m: int):
        self.ev = ev.tolist()
        self.ec = ec.tolist()
        self.var_checks: list[list[int]] = [[] for _ in range(n)]
        self.check_vars: list[list[int]] = [[] for _ in range(m)]
        for v, c in zip(self.ev, self.ec):
            self.var_checks[v].append(c)
            self.check_vars[c].append(v)

    def has_edge(self, v: int, c: int) -> bool:
        return c in self.var_checks[v]

    def creates_4cycle(self, v: int, c: int, skip_v: int) -> bool:
        """Would adding edge (v, c) close a 4-cycle?  ``skip_v`` is leaving c."""
        mates = set()
        for c2 in self.var_checks[v]:
            if c2 != c:
                mates.update(self.check_vars[c2])
        mates.discard(v)
        return any(u in mates for u in self.check_vars[c] if u != skip_v)

    def swap(self, e: int, f: int) -> None:
        v1, c1, v2, c2 = self.ev[e], self.ec[e], self.ev[f], self.ec[f]
        self.var_checks[v1].remove(c1)
        self.var_checks[v2].remove(c2)
        self.check_vars[c1].remove(v1)
        self.check_vars[c2].remove(v2)
        self.var_checks[v1].append(c2)
        self.var_checks[v2].append(c1)
        self.check_vars[c2].append(v1)
        self.check_vars[c1].append(v2)
        self.ec[e], self.ec[f] = c2, c1

    def bad_edges(self, girth6: bool) -> list[int]:
        bad = set()
        seen: dict[tuple[int, int], int] = {}
        for e, key in enumerate(zip(self.ev, self.ec)):
            if key in seen:
                bad.add(e)
            else:
                seen[key] = e
        if girth6 and not bad:
            owner: dict[tuple[int, int], int] = {}
            for c, vs in enumerate(self.check_vars):
                for a, b in itertools.combinations(sorted(vs), 2):
                    if (a, b) in owner and owner[(a, b)] != c:
                        bad.add(seen[(a, c)])
                    else:
                        owner[(a, b)] = c
        return sorted(bad)


def build_regular_code(
    n: int, w_col: int, w_row: int, seed: int, min_girth: int = 4
) -> Code:
    """Random (w_col, w_row)-regular code from a configuration-model matching.

    Repeated edges, and with ``min_girth=6`` also 4-cycles, are removed by
    random edge swaps; at most ``100 * n`` swaps are attempted.
    """
    if n < 1 or w_col < 1 or w_row < 1:
        raise ValueError("n, w_col, w_row must be positive")
    if (n * w_col) % w_row:
        raise ValueError(f"n*w_col = {n * w_col} is not divisible by w_row = {w_row}")
    if w_row > n:
        raise ValueError("w_row cannot exceed n")
    if min_girth not in (4, 6):
        raise ValueError("min_girth must be 4 or 6")
    m = n * w_col // w_row
    rng = np.random.default_rng(seed)
    ev = np.repeat(np.arange(n), w_col)
    ec = rng.permutation(np.repeat(np.arange(m), w_row))
    g = _TannerGraph(ev, ec, n, m)
    girth6 = min_girth == 6
    budget = 100 * n
    n_edges = len(g.ev)
    while True:
        bad = g.bad_edges(girth6)
        if not bad:
            break
        for e in bad:
            while budget > 0:
                budget -= 1
                f = int(rng.integers(n_edges))
                v1, c1, v2, c2 = g.ev[e], g.ec[e], g.ev[f], g.ec[f]
                if c1 == c2 or v1 == v2 or g.has_edge(v1, c2) or g.has_edge(v2, c1):
                    continue
                if girth6 and (
                    g.creates_4cycle(v1, c2, skip_v=v2) or g.creates_4cycle(v2, c1, skip_v=v1)
                ):
                    continue
                g.swap(e, f)
                break
            if budget <= 0:
                raise RuntimeError(
                    f"could not resolve the Tanner graph after {100 * n} swaps"
                )
    return Code(n, tuple(np.asarray(vs) for vs in g.check_vars))


def build_all_rows_code(n: int, w_row: int, cap: int = ALL_ROWS_CAP) -> Code:
    """Every weight-``w_row`` row of length ``n``, in lexicographic support order."""
    if not 1 <= w_row <= n:
        raise ValueError("need 1 <= w_row <= n")
    count = math.comb(n, w_row)
    if count > cap:
        raise ValueError(f"binomial({n},{w_row}) = {count} exceeds cap {cap}")
    return Code(n, tuple(np.array(s) for s in itertools.combinations(range(n), w_row)))


def pg2q_rate(s: int) -> float:
    q = 2**s
    return 1 - (3**s + 1) / (q * q + q + 1)


def build_pg2q_code(s: int, cap: int = PG_MAX_S) -> Code:
    """Point-line incidence matrix of PG(2, 2^s).

    Points are the nonzero elements of GF(q^3) modulo GF(q)^*, i.e. the powers
    ``alpha^i`` for ``0 <= i < q^2+q+1``.  Line ``b`` is the kernel of
    ``x -> Tr(alpha^b x)`` with ``Tr`` the trace from GF(q^3) to GF(q), so
    point ``i`` is on line ``b`` iff ``Tr(alpha^(b+i)) = 0``.
    """
    if not 1 <= s <= cap:
        raise ValueError(f"s must lie in [1, {cap}]")
    q = 2**s
    n = q * q + q + 1
    exp = galois.exp_table(3 * s)
    order = len(exp)
    k = np.arange(n)
    trace = exp[k] ^ exp[(k * q) % order] ^ exp[(k * q * q) % order]
    zeros = np.flatnonzero(trace == 0)
    if len(zeros) != q + 1:
        raise RuntimeError("trace kernel has the wrong size")
    rows = tuple(np.sort((zeros - b) % n) for b in range(n))
    return Code(n, rows)


def build_bernoulli_code(n: int, m: int, theta: float, seed: int) -> Code:
    """i.i.d. Bernoulli(theta) entries; all-zero rows are redrawn."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    H = rng.random((m, n)) < theta
    empty = ~H.any(axis=1)
    while empty.any():
        H[empty] = rng.random((int(empty.sum()), n)) < theta
        empty = ~H.any(axis=1)
    return Code(n, tuple(np.flatnonzero(row) for row in H))


# ---------------------------------------------------------------------------
# Inspection


def _has_4cycle(code: Code) -> bool:
    owner: dict[tuple[int, int], int] = {}
    for j, r in enumerate(code.rows):
        for pair in itertools.combinations(r.tolist(), 2):
            if pair in owner:
                return True
            owner[pair] = j
    return False


def girth(code: Code) -> float:
    """Length of the shortest Tanner-graph cycle; ``math.inf`` for a forest."""
    if _has_4cycle(code):
        return 4
    n = code.n
    # variables are nodes 0 .. n-1, checks n .. n+m-1
    adj = [(c + n).tolist() for c in code.cols] + [r.tolist() for r in code.rows]
    best = math.inf
    for s in range(len(adj)):
        if not adj[s]:
            continue
        dist = {s: 0}
        parent = {s: -1}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for w in adj[u]:
                if w == parent[u]:
                    continue
                if w in dist:
                    best = min(best, dist[u] + dist[w] + 1)
                else:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
        if best == 6:
            # 4-cycles were ruled out above
            break
    return best


# ---------------------------------------------------------------------------
# Serialization


def to_alist(code: Code) -> str:
    """MacKay's alist format (1-based indices, zero padded)."""
    cw, rw = code.col_weights(), code.row_weights()
    max_c, max_r = int(cw.max()), int(rw.max())
    lines = [f"{code.n} {code.m}", f"{max_c} {max_r}"]
    lines.append(" ".join(map(str, cw)))
    lines.append(" ".join(map(str, rw)))
    for c in code.cols:
        idx = (c + 1).tolist() + [0] * (max_c - len(c))
        lines.append(" ".join(map(str, idx)))
    for r in code.rows:
        idx = (r + 1).tolist() + [0] * (max_r - len(r))
        lines.append(" ".join(map(str, idx)))
    return "\n".join(lines) + "\n"


def from_alist(text: str) -> Code:
    tok = iter(text.split())
    try:
        n, m = int(next(tok)), int(next(tok))
        next(tok), next(tok)
        cw = [int(next(tok)) for _ in range(n)]
        rw = [int(next(tok)) for _ in range(m)]
        max_c, max_r = max(cw), max(rw)
        col_lists = [[int(next(tok)) for _ in range(max_c)] for _ in range(n)]
        row_lists = [[int(next(tok)) for _ in range(max_r)] for _ in range(m)]
    except StopIteration:
        raise ValueError("truncated alist data") from None
    rows = tuple(np.array([x - 1 for x in r if x > 0]) for r in row_lists)
    for j, r in enumerate(rows):
        if len(r) != rw[j]:
            raise ValueError(f"row {j}: declared weight {rw[j]} but {len(r)} entries")
    code = Code(n, rows)
    for i, c in enumerate(col_lists):
        if sorted(x - 1 for x in c if x > 0) != code.cols[i].tolist():
            raise ValueError(f"column {i} disagrees with the row lists")
    return code


def to_json(code: Code) -> str:
    return json.dumps({"n": code.n, "m": code.m, "rows": [r.tolist() for r in code.rows]})


def from_json(text: str) -> Code:
    d = json.loads(text)
    code = Code(int(d["n"]), tuple(np.array(r) for r in d["rows"]))
    if "m" in d and int(d["m"]) != code.m:
        raise ValueError("row count disagrees with 'm'")
    return code


def load_code(path) -> Code:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return from_json(text)
    return from_alist(text)

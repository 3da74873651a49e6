"""Inequality descriptions of the fundamental polytope and cone.

The polytope ``P`` is the intersection of the convex hulls of the
single-check codes; the cone ``K`` is its conic hull.  Both are emitted as a
:class:`LinearSystem`, a CSR-style list of sparse inequalities.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple

import numpy as np
import scipy.sparse as sp

from .codes import Code

MAX_POLYTOPE_ROW_WEIGHT = 16
DEFAULT_TOL = 1e-9

_SENSES = ("<=", ">=", "==")


class Inequality(NamedTuple):
    indices: np.ndarray
    coeffs: np.ndarray
    sense: str
    rhs: float


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Sparse linear constraints ``a_k . x (<=|>=|==) b_k`` over ``n_vars`` variables."""

    n_vars: int
    indptr: np.ndarray
    indices: np.ndarray
    coeffs: np.ndarray
    senses: tuple[str, ...]
    rhs: np.ndarray

    def __post_init__(self):
        if len(self.indptr) != len(self.senses) + 1 or len(self.rhs) != len(self.senses):
            raise ValueError("inconsistent row arrays")
        if self.indices.size and (self.indices.min() < 0 or self.indices.max() >= self.n_vars):
            raise ValueError("variable index out of range")
        if np.any(np.diff(self.indptr) == 0):
            raise ValueError("empty inequality")
        if any(s not in _SENSES for s in self.senses):
            raise ValueError("unknown relation")

    @classmethod
    def from_rows(cls, n_vars: int, rows: Iterable) -> "LinearSystem":
        """Build from ``(indices, coeffs, sense, rhs)`` records."""
        indptr, idx, val, senses, rhs = [0], [], [], [], []
        for indices, coeffs, sense, b in rows:
            indices = list(indices)
            coeffs = list(coeffs)
            if len(indices) != len(coeffs):
                raise ValueError("index/coefficient length mismatch")
            idx.extend(indices)
            val.extend(coeffs)
            indptr.append(len(idx))
            senses.append(sense)
            rhs.append(b)
        exact = any(isinstance(v, Fraction) for v in itertools.chain(val, rhs))
        dtype = object if exact else float
        return cls(
            n_vars,
            np.asarray(indptr, dtype=np.int64),
            np.asarray(idx, dtype=np.int64),
            np.asarray(val, dtype=dtype),
            tuple(senses),
            np.asarray(rhs, dtype=dtype),
        )

    @classmethod
    def empty(cls, n_vars: int) -> "LinearSystem":
        return cls.from_rows(n_vars, [])

    def __len__(self) -> int:
        return len(self.senses)

    def __iter__(self) -> Iterator[Inequality]:
        for k, sense in enumerate(self.senses):
            lo, hi = self.indptr[k], self.indptr[k + 1]
            yield Inequality(self.indices[lo:hi], self.coeffs[lo:hi], sense, self.rhs[k])

    def __add__(self, other: "LinearSystem") -> "LinearSystem":
        if other.n_vars != self.n_vars:
            raise ValueError("dimension mismatch")
        return LinearSystem.from_rows(self.n_vars, itertools.chain(self, other))

    def matrix(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.coeffs.astype(float), self.indices, self.indptr),
            shape=(len(self), self.n_vars),
        )

    def to_dense(self) -> tuple[np.ndarray, tuple[str, ...], np.ndarray]:
        A = np.zeros((len(self), self.n_vars), dtype=self.coeffs.dtype)
        if A.dtype == object:
            A[:] = Fraction(0)
        for k, row in enumerate(self):
            for i, a in zip(row.indices, row.coeffs):
                A[k, i] += a
        return A, self.senses, self.rhs.copy()

    def violations(self, x) -> np.ndarray:
        """Per-row amount by which ``x`` violates each constraint (0 if satisfied)."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_vars,):
            raise ValueError(f"expected a vector of length {self.n_vars}")
        lhs = self.matrix() @ x
        b = self.rhs.astype(float)
        out = np.zeros(len(self))
        s = np.array(self.senses)
        le, ge, eq = s == "<=", s == ">=", s == "=="
        out[le] = np.maximum(lhs[le] - b[le], 0)
        out[ge] = np.maximum(b[ge] - lhs[ge], 0)
        out[eq] = np.abs(lhs[eq] - b[eq])
        return out

    def is_satisfied(self, x, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.all(self.violations(x) <= tol))

    def to_text(self) -> str:
        """Objective-free listing in a CPLEX-LP-like syntax."""
        lines = [f"\\ {len(self)} constraints over {self.n_vars} variables", "Subject To"]
        for k, row in enumerate(self):
            terms = " ".join(
                f"{'-' if a < 0 else '+'} {_fmt(abs(a))} w{i}" for i, a in zip(row.indices, row.coeffs)
            )
            lines.append(f" c{k}: {terms} {row.sense} {_fmt(row.rhs)}")
        lines.append("End")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LinearSystem":
        lines = [ln.strip() for ln in text.splitlines()]
        header = lines[0]
        n_vars = int(header.split("over")[1].split()[0])
        rows = []
        for ln in lines:
            if not ln.startswith("c") or ":" not in ln:
                continue
            body = ln.split(":", 1)[1].split()
            sense, rhs = body[-2], _parse(body[-1])
            terms = body[:-2]
            idx, val = [], []
            for sign, mag, var in zip(terms[0::3], terms[1::3], terms[2::3]):
                v = _parse(mag)
                idx.append(int(var[1:]))
                val.append(-v if sign == "-" else v)
            rows.append((idx, val, sense, rhs))
        return cls.from_rows(n_vars, rows)


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return repr(float(v))


def _parse(tok: str):
    return Fraction(tok) if "/" in tok else float(tok)


# ---------------------------------------------------------------------------


def polytope_inequalities(code: Code, max_row_weight: int = MAX_POLYTOPE_ROW_WEIGHT) -> LinearSystem:
    """Box constraints plus one odd-subset inequality per (row, odd subset).

    The odd-subset inequality ``sum_{S} w_i + sum_{I_j \\ S} (1 - w_i) <= |I_j| - 1``
    is stored as ``sum_S w_i - sum_{I_j \\ S} w_i <= |S| - 1``.
    """
    worst = int(code.row_weights().max())
    if worst > max_row_weight:
        raise ValueError(f"row weight {worst} exceeds cap {max_row_weight}")
    rows = []
    for i in range(code.n):
        rows.append(([i], [1.0], ">=", 0.0))
        rows.append(([i], [1.0], "<=", 1.0))
    for r in code.rows:
        w = len(r)
        for size in range(1, w + 1, 2):
            for subset in itertools.combinations(range(w), size):
                c = -np.ones(w)
                c[list(subset)] = 1.0
                rows.append((r.tolist(), c.tolist(), "<=", float(size - 1)))
    return LinearSystem.from_rows(code.n, rows)


def cone_inequalities(code: Code) -> LinearSystem:
    """Non-negativity plus ``w_i' <= sum_{I_j \\ i'} w_i`` for every edge (j, i')."""
    rows = [([i], [1.0], ">=", 0.0) for i in range(code.n)]
    for r in code.rows:
        for k in range(len(r)):
            c = -np.ones(len(r))
            c[k] = 1.0
            rows.append((r.tolist(), c.tolist(), "<=", 0.0))
    return LinearSystem.from_rows(code.n, rows)


def _as_vector(omega, code: Code) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (code.n,):
        raise ValueError(f"expected a vector of length {code.n}, got shape {omega.shape}")
    return omega


def _row_reduce(code: Code, values: np.ndarray, ufunc) -> np.ndarray:
    _, vars_ = code.edges
    starts = np.cumsum([0] + [len(r) for r in code.rows[:-1]])
    return ufunc.reduceat(values[vars_], starts)


def in_cone(omega, code: Code, tol: float = DEFAULT_TOL) -> bool:
    """All cone inequalities hold within additive slack ``tol``.

    Row sums are re-evaluated with ``math.fsum`` near the boundary, so the
    decision for ``tol = 0`` is the correctly rounded one.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    omega = _as_vector(omega, code)
    if np.any(omega < -tol):
        return False
    # w_i' <= S_j - w_i' for all i' in I_j  <=>  2 max_j <= S_j
    sums = _row_reduce(code, omega, np.add)
    peaks = _row_reduce(code, omega, np.maximum)
    slack = sums - 2 * peaks + tol
    close = np.flatnonzero(slack <= 1e-9 * (1 + np.abs(sums)))
    for j in close:
        s = math.fsum(omega[code.rows[j]])
        if 2 * peaks[j] > s + tol:
            return False
    return True


def polytope_violation(omega, code: Code) -> float:
    """Largest violation of any box or odd-subset inequality by ``omega``.

    Uses the standard separation rule per row (put ``i`` in the odd subset
    when ``omega_i > 1/2``, then fix parity at the cheapest position), so no
    enumeration of the ``2^(w-1)`` subsets is needed.
    """
    omega = _as_vector(omega, code)
    worst = max(0.0, float(np.max(-omega)), float(np.max(omega - 1)))
    for r in code.rows:
        w = omega[r]
        # inequality value minus bound:  sum_S (w-1) - sum_rest w + 1
        take = w > 0.5
        if take.sum() % 2 == 0:
            k = int(np.argmin(np.abs(2 * w - 1)))
            take[k] = not take[k]
        value = math.fsum(np.append(np.where(take, w - 1, -w), 1.0))
        worst = max(worst, value)
    return worst


def in_polytope(omega, code: Code, tol: float = DEFAULT_TOL) -> bool:
    """All polytope inequalities hold within additive slack ``tol``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return polytope_violation(omega, code) <= tol


def _reciprocal_up(d: float) -> float:
    """Smallest double ``r`` with ``r * d >= 1`` in exact arithmetic."""
    r = 1.0 / d
    while Fraction(r) * Fraction(d) < 1:
        r = float(np.nextafter(r, np.inf))
    return r


def zero_neighborhood_completion(gamma, w_row: int) -> np.ndarray:
    """``1/(w_row-1)`` where ``gamma_i >= 0`` (including ``+inf``), ``1`` elsewhere.

    The reciprocal is rounded upward so the vector lies in the cone exactly.
    """
    if w_row < 2:
        raise ValueError("w_row must be at least 2")
    gamma = np.asarray(gamma, dtype=float)
    return np.where(gamma >= 0, _reciprocal_up(w_row - 1), 1.0)


def bernoulli_completion(gamma, theta: float, delta: float) -> np.ndarray:
    """``1/(n theta - delta - 1)`` where ``gamma_i >= 0``, ``1`` elsewhere."""
    gamma = np.asarray(gamma, dtype=float)
    d = len(gamma) * theta - delta - 1
    if not d > 1:
        raise ValueError(f"n*theta - delta - 1 = {d} must exceed 1")
    return np.where(gamma >= 0, _reciprocal_up(d), 1.0)

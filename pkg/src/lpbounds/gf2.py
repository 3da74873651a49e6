"""Linear algebra over GF(2) on bit-packed rows.

Rows are packed into Python integers (bit ``i`` holds column ``i``), which
keeps elimination exact and fast enough for matrices with a few thousand
columns.
"""

from __future__ import annotations

import numpy as np


def pack_rows(H) -> list[int]:
    """Pack each row of a 0/1 matrix into an integer bitset."""
    H = np.asarray(H, dtype=np.uint8) & 1
    weights = 1 << np.arange(H.shape[1], dtype=object)
    return [int(np.dot(row.astype(object), weights)) for row in H]


def unpack_rows(rows: list[int], n_cols: int) -> np.ndarray:
    out = np.zeros((len(rows), n_cols), dtype=np.uint8)
    for r, v in enumerate(rows):
        for c in range(n_cols):
            if (v >> c) & 1:
                out[r, c] = 1
    return out


def _echelon(rows: list[int], n_cols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form; returns (pivot rows, pivot columns)."""
    work = [r for r in rows if r]
    basis: list[int] = []
    pivots: list[int] = []
    for col in range(n_cols):
        bit = 1 << col
        idx = next((k for k, r in enumerate(work) if r & bit), None)
        if idx is None:
            continue
        prow = work.pop(idx)
        work = [r ^ prow if r & bit else r for r in work]
        basis = [b ^ prow if b & bit else b for b in basis]
        basis.append(prow)
        pivots.append(col)
        work = [r for r in work if r]
        if not work:
            break
    return basis, pivots


def gf2_rank(H) -> int:
    """Rank of a binary matrix over GF(2).

    Accepts a dense 0/1 array or a list of packed integer rows (in which
    case the column count is inferred from the widest row).
    """
    if isinstance(H, list) and (not H or isinstance(H[0], int)):
        n_cols = max((r.bit_length() for r in H), default=0)
        rows = H
    else:
        H = np.asarray(H)
        n_cols = H.shape[1]
        rows = pack_rows(H)
    basis, _ = _echelon(rows, n_cols)
    return len(basis)


def nullspace_basis(H) -> np.ndarray:
    """Basis of ``{x : H x = 0 (mod 2)}`` as the rows of a 0/1 matrix."""
    H = np.asarray(H, dtype=np.uint8)
    n = H.shape[1]
    basis, pivots = _echelon(pack_rows(H), n)
    free = [c for c in range(n) if c not in set(pivots)]
    out = np.zeros((len(free), n), dtype=np.uint8)
    for k, f in enumerate(free):
        out[k, f] = 1
        for prow, pcol in zip(basis, pivots):
            if (prow >> f) & 1:
                out[k, pcol] = 1
    return out


def enumerate_codewords(H, max_dim: int = 24) -> np.ndarray:
    """All codewords of the nullspace of ``H``, one per row.

    Rows come out in lexicographic order of the 0/1 words.
    """
    G = nullspace_basis(H)
    k = G.shape[0]
    if k > max_dim:
        raise ValueError(f"code dimension {k} exceeds enumeration cap {max_dim}")
    coeffs = (np.arange(1 << k)[:, None] >> np.arange(k)[None, :]) & 1
    words = (coeffs.astype(np.int64) @ G.astype(np.int64)) & 1
    words = words.astype(np.uint8)
    order = np.lexsort(words.T[::-1])
    return words[order]

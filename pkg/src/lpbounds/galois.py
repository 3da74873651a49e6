"""Minimal GF(2^m) arithmetic via exp/log tables."""

from __future__ import annotations

import numpy as np

# Primitive polynomials over GF(2), bit k is the coefficient of x^k.
PRIMITIVE_POLYS = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
}


def exp_table(m: int) -> np.ndarray:
    """Powers ``alpha^k`` for ``k = 0 .. 2^m - 2`` of a primitive element.

    Raises ValueError if the stored polynomial turns out not to be primitive.
    """
    try:
        poly = PRIMITIVE_POLYS[m]
    except KeyError:
        raise ValueError(f"no primitive polynomial stored for degree {m}") from None
    order = (1 << m) - 1
    table = np.empty(order, dtype=np.int64)
    v = 1
    for k in range(order):
        table[k] = v
        v <<= 1
        if v >> m:
            v ^= poly
        if v == 1 and k < order - 1:
            raise ValueError(f"polynomial {poly:#b} is not primitive")
    if v != 1:
        raise ValueError(f"polynomial {poly:#b} is not primitive")
    return table


def log_table(exp: np.ndarray) -> np.ndarray:
    log = np.full(len(exp) + 1, -1, dtype=np.int64)
    log[exp] = np.arange(len(exp))
    return log


def mul(a: int, b: int, exp: np.ndarray, log: np.ndarray) -> int:
    if a == 0 or b == 0:
        return 0
    return int(exp[(log[a] + log[b]) % len(exp)])

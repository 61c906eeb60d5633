"""Exact integer/rational linear algebra shared by the lattice and polynomial modules."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np


def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-free (Bareiss) elimination with row pivoting."""
    a = [list(map(int, row)) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise ValueError("matrix must be square")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def rank(vectors: Sequence[Sequence]) -> int:
    """Exact rank of a list of integer or rational vectors."""
    rows = [[Fraction(x) for x in v] for v in vectors]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


class IncrementalRank:
    """Row-echelon accumulator answering "does this vector raise the rank?"."""

    def __init__(self, n: int):
        self.n = n
        self.pivots: dict[int, list[Fraction]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add(self, v: Sequence[int]) -> bool:
        w = [Fraction(x) for x in v]
        for c in sorted(self.pivots):
            if w[c] != 0:
                row = self.pivots[c]
                f = w[c] / row[c]
                w = [x - f * y for x, y in zip(w, row)]
        lead = next((c for c, x in enumerate(w) if x != 0), None)
        if lead is None:
            return False
        self.pivots[lead] = w
        return True


def cyclic_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact cyclic convolution of two equal-length integer vectors."""
    n = len(a)
    if a.dtype == object or b.dtype == object:
        out = [0] * n
        nz = [(i, int(v)) for i, v in enumerate(a) if v]
        for j, w in enumerate(b):
            w = int(w)
            if w:
                for i, v in nz:
                    out[(i + j) % n] += v * w
        return np.array(out, dtype=object)
    full = np.convolve(a, b)
    out = full[:n].copy()
    out[: n - 1] += full[n:]
    return out

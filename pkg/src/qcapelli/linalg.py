"""Exact sparse linear algebra over Q(q)."""

from __future__ import annotations

import heapq
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from .scalar import ONE, ZERO, RatFunc

Vector = Dict[Hashable, RatFunc]


def axpy(target: Vector, coef: RatFunc, source: Vector) -> None:
    """target += coef * source, in place, dropping zeros."""
    for key, value in source.items():
        new = target.get(key, ZERO) + coef * value
        if new:
            target[key] = new
        else:
            target.pop(key, None)


def scaled(vec: Vector, coef: RatFunc) -> Vector:
    return {k: v * coef for k, v in vec.items()} if coef else {}


class Echelon:
    """Incrementally maintained echelon basis of a span of sparse vectors.

    The pivot of a row is its largest column under ``order``; every stored
    row has pivot coefficient one.
    """

    def __init__(self, order: Callable[[Hashable], object] = lambda k: k):
        self.order = order
        self.rows: Dict[Hashable, Vector] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: Vector) -> Vector:
        """Fully reduce vec against the stored rows; returns a new vector."""
        vec = {k: v for k, v in vec.items() if v}
        heap = [(_neg(self.order(k)), i, k) for i, k in enumerate(vec) if k in self.rows]
        heapq.heapify(heap)
        counter = len(heap)
        while heap:
            _, _, col = heapq.heappop(heap)
            coef = vec.get(col)
            if not coef:
                continue
            row = self.rows[col]
            for key, value in row.items():
                new = vec.get(key, ZERO) - coef * value
                if new:
                    if key not in vec and key in self.rows:
                        counter += 1
                        heapq.heappush(heap, (_neg(self.order(key)), counter, key))
                    vec[key] = new
                else:
                    vec.pop(key, None)
        return vec

    def pivot_of(self, vec: Vector) -> Hashable:
        return max(vec, key=self.order)

    def add(self, vec: Vector) -> Optional[Hashable]:
        """Insert vec; returns its new pivot column, or None if dependent."""
        residual = self.reduce(vec)
        if not residual:
            return None
        pivot = self.pivot_of(residual)
        inv = residual[pivot].inverse()
        self.rows[pivot] = {k: v * inv for k, v in residual.items()}
        return pivot

    def contains(self, vec: Vector) -> bool:
        return not self.reduce(vec)

    def reduced_rows(self) -> Dict[Hashable, Vector]:
        """Rows in reduced echelon form: no row touches another pivot."""
        done: Dict[Hashable, Vector] = {}
        helper = Echelon(self.order)
        for pivot in sorted(self.rows, key=self.order):
            row = helper.reduce(self.rows[pivot])
            helper.rows[pivot] = row
            done[pivot] = row
        return done


class _Neg:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return other.v < self.v

    def __eq__(self, other):
        return self.v == other.v


def _neg(v):
    return _Neg(v)


Matrix = List[List[RatFunc]]


def rref(matrix: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form of a dense matrix and its pivot columns."""
    m = [list(row) for row in matrix]
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        pick = next((i for i in range(r, rows) if m[i][c]), None)
        if pick is None:
            continue
        m[r], m[pick] = m[pick], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(matrix: Matrix) -> int:
    return len(rref(matrix)[1]) if matrix else 0


def nullspace(matrix: Matrix, ncols: Optional[int] = None) -> List[List[RatFunc]]:
    """A basis of {v : matrix v = 0}."""
    if ncols is None:
        ncols = len(matrix[0]) if matrix else 0
    if not matrix:
        return [[ONE if i == j else ZERO for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(matrix)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for row, p in zip(red, pivots):
            if row[f]:
                v[p] = -row[f]
        basis.append(v)
    return basis


def inverse(matrix: Matrix) -> Matrix:
    n = len(matrix)
    aug = [list(row) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(matrix)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or (len(pivots) > n and pivots[n - 1] != n - 1):
        raise ZeroDivisionError("matrix is singular")
    if len([p for p in pivots if p < n]) < n:
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red[:n]]


def determinant(matrix: Matrix) -> RatFunc:
    m = [list(row) for row in matrix]
    n = len(m)
    det = ONE
    for c in range(n):
        pick = next((i for i in range(c, n) if m[i][c]), None)
        if pick is None:
            return ZERO
        if pick != c:
            m[c], m[pick] = m[pick], m[c]
            det = -det
        det = det * m[c][c]
        inv = m[c][c].inverse()
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def solve(matrix: Matrix, rhs: Sequence[RatFunc]) -> Optional[List[RatFunc]]:
    """One solution of matrix v = rhs, or None when inconsistent."""
    n = len(matrix[0]) if matrix else 0
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    v = [ZERO] * n
    for row, p in zip(red, pivots):
        v[p] = row[n]
    return v

"""Constants and index conventions for the three symmetric-pair families.

Indices are 1-based throughout, matching the usual matrix notation.  For the
diagonal family the ambient indices run over 1..2n, the second copy of gl_n
occupying n+1..2n.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .scalar import ONE, Q, QINV, ZERO, RatFunc, qpow

Index = Tuple[int, int]
Tensor = Dict[Tuple[int, int, int, int], object]


class Kind(str, enum.Enum):
    AI = "ai"
    AII = "aii"
    DIAG = "diag"

    @classmethod
    def parse(cls, text: str) -> "Kind":
        key = text.strip().lower()
        aliases = {"ai": cls.AI, "aii": cls.AII, "diag": cls.DIAG, "diagonal": cls.DIAG}
        if key not in aliases:
            raise ValueError(f"unknown family {text!r}; expected ai, aii or diag")
        return aliases[key]


Partition = Tuple[int, ...]


def make_partition(parts: Sequence[int], max_parts: Optional[int] = None) -> Partition:
    parts = [int(p) for p in parts]
    if any(p < 0 for p in parts):
        raise ValueError("partition parts must be nonnegative")
    if any(a < b for a, b in zip(parts, parts[1:])):
        raise ValueError(f"partition {parts} is not weakly decreasing")
    while parts and parts[-1] == 0:
        parts.pop()
    if max_parts is not None and len(parts) > max_parts:
        raise ValueError(f"partition {tuple(parts)} has more than {max_parts} parts")
    return tuple(parts)


def parse_partition(text: str, max_parts: Optional[int] = None) -> Partition:
    text = text.strip()
    if not text or text in ("0", "()", "empty"):
        return ()
    try:
        parts = [int(p) for p in text.strip("()").split(",") if p.strip()]
    except ValueError as exc:
        raise ValueError(f"cannot parse partition {text!r}") from exc
    return make_partition(parts, max_parts)


def partitions_of(size: int, max_parts: int, max_part: Optional[int] = None) -> List[Partition]:
    """Partitions of size with at most max_parts parts, in reverse lex order."""
    if max_part is None:
        max_part = size
    if size == 0:
        return [()]
    if max_parts == 0:
        return []
    out = []
    for first in range(min(size, max_part), 0, -1):
        for rest in partitions_of(size - first, max_parts - 1, first):
            out.append((first,) + rest)
    return out


def partitions_up_to(size: int, max_parts: int) -> List[Partition]:
    out = []
    for s in range(size + 1):
        out.extend(partitions_of(s, max_parts))
    return out


def standard_r(i: int, j: int, k: int, l: int) -> RatFunc:
    """Entry r^{ij}_{kl} of the standard R-matrix of gl_N."""
    if i == j:
        return Q if (k, l) == (i, j) else ZERO
    if (k, l) == (i, j):
        return ONE
    if (k, l) == (j, i) and j < i:
        return Q - QINV
    return ZERO


@dataclass(frozen=True)
class FamilyDescriptor:
    kind: Kind
    n: int
    N: int = field(init=False)
    gamma_x: RatFunc = field(init=False, compare=False)
    gamma_d: RatFunc = field(init=False, compare=False)
    canonical: Tuple[Index, ...] = field(init=False, compare=False)
    m: int = field(init=False, compare=False)
    a: RatFunc = field(init=False, compare=False)
    g: RatFunc = field(init=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("restricted rank n must be at least 1")
        n = self.n
        if self.kind is Kind.AI:
            N, gx, gd, m, a, g = n, Q, QINV, 4, qpow(4), qpow(2)
            canon = [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]
        elif self.kind is Kind.AII:
            N, gx, gd, m, a, g = 2 * n, -QINV, -Q, 2, qpow(2), qpow(4)
            canon = [(i, j) for i in range(1, N + 1) for j in range(i + 1, N + 1)]
        else:
            N, gx, gd, m, a, g = 2 * n, ONE, ONE, 2, qpow(2), qpow(2)
            canon = [(i, n + j) for i in range(1, n + 1) for j in range(1, n + 1)]
        for name, value in (("N", N), ("gamma_x", gx), ("gamma_d", gd), ("m", m), ("a", a), ("g", g), ("canonical", tuple(canon))):
            object.__setattr__(self, name, value)

    # labels
    @property
    def name(self) -> str:
        return {Kind.AI: "AI", Kind.AII: "AII", Kind.DIAG: "Diagonal"}[self.kind]

    def __str__(self):
        return f"{self.name}(n={self.n})"

    # index data
    def half(self, i: int) -> int:
        return 0 if i <= self.n else 1

    def in_zero_set(self, i: int, j: int) -> bool:
        if self.kind is Kind.AI:
            return False
        if self.kind is Kind.AII:
            return i == j
        return self.half(i) == self.half(j)

    def linear_form(self, i: int, j: int, gamma: RatFunc) -> List[Tuple[RatFunc, Index]]:
        """Write the generator with indices (i, j) through canonical ones."""
        if not (1 <= i <= self.N and 1 <= j <= self.N):
            raise ValueError(f"index ({i},{j}) out of range 1..{self.N}")
        if self.in_zero_set(i, j):
            return []
        if (i, j) in self._canonical_set:
            return [(ONE, (i, j))]
        # (i, j) = gamma^{-1}-multiple of the transposed canonical generator
        if (j, i) not in self._canonical_set:
            raise AssertionError(f"no canonical form for ({i},{j})")
        return [(gamma.inverse(), (j, i))]

    @property
    def _canonical_set(self):
        cached = self.__dict__.get("_cset")
        if cached is None:
            cached = frozenset(self.canonical)
            object.__setattr__(self, "_cset", cached)
        return cached

    def shat(self, s: int) -> int:
        """The exponent index used to scale d-generators."""
        if self.kind is Kind.DIAG and s > self.n:
            return s - self.n
        return s

    def t_vanishes(self, i: int, j: int) -> bool:
        """Block-zero convention for the tensor square in the diagonal family."""
        return self.kind is Kind.DIAG and self.half(i) != self.half(j)

    def r_entry(self, i: int, j: int, k: int, l: int) -> RatFunc:
        if self.kind is not Kind.DIAG:
            return standard_r(i, j, k, l)
        hi, hj = self.half(i), self.half(j)
        if hi == hj:
            if self.half(k) != hi or self.half(l) != hi:
                return ZERO
            s = hi * self.n
            return standard_r(i - s, j - s, k - s, l - s)
        return ONE if (i, j) == (k, l) else ZERO

    def j_entry(self, r: int, s: int) -> RatFunc:
        if self.kind is Kind.AI:
            return ONE if r == s else ZERO
        if self.kind is Kind.AII:
            if r % 2 == 1 and s == r + 1:
                return ONE
            if r % 2 == 0 and s == r - 1:
                return -Q
            return ZERO
        return ONE if abs(r - s) == self.n else ZERO

    def j_support(self) -> List[Tuple[int, int, RatFunc]]:
        return [(r, s, self.j_entry(r, s)) for r in range(1, self.N + 1) for s in range(1, self.N + 1) if self.j_entry(r, s)]

    def simple_indices(self) -> List[int]:
        """Indices i for which E_i and F_i belong to the quantum group."""
        return [i for i in range(1, self.N) if not (self.kind is Kind.DIAG and i == self.n)]

    # weights
    def weight_2lambda(self, lam: Sequence[int]) -> Tuple[int, ...]:
        lam = make_partition(lam, self.n)
        w = [0] * self.N
        for i, part in enumerate(lam, start=1):
            if self.kind is Kind.AI:
                w[i - 1] += 2 * part
            elif self.kind is Kind.AII:
                w[2 * i - 2] += part
                w[2 * i - 1] += part
            else:
                w[i - 1] += part
                w[self.n + i - 1] += part
        return tuple(w)

    def fundamental(self, r: int) -> Partition:
        return (1,) * r

    def sub_family(self, r: int) -> "FamilyDescriptor":
        return FamilyDescriptor(self.kind, r)

    def lift_index(self, sub_n: int, i: int) -> int:
        """Map an ambient index of the rank sub_n family into this family."""
        if self.kind is Kind.DIAG and i > sub_n:
            return i - sub_n + self.n
        return i


def build_family(kind, n: int) -> FamilyDescriptor:
    if not isinstance(kind, Kind):
        kind = Kind.parse(str(kind))
    return FamilyDescriptor(kind, int(n))


# four-index tensors: A = sum A[i,j,k,l] e_ik (x) e_jl

def tensor_mul(A: Tensor, B: Tensor, zero=ZERO) -> Tensor:
    by_row: Dict[Tuple[int, int], List] = {}
    for (m, p, k, l), v in B.items():
        by_row.setdefault((m, p), []).append((k, l, v))
    out: Tensor = {}
    for (i, j, m, p), a in A.items():
        for k, l, b in by_row.get((m, p), ()):
            key = (i, j, k, l)
            out[key] = out.get(key, zero) + a * b
    return out


def r_tensor(fam: FamilyDescriptor) -> Tensor:
    N = fam.N
    return {(i, j, k, l): v for i, j, k, l in product(range(1, N + 1), repeat=4) if (v := fam.r_entry(i, j, k, l))}


def r_t1(fam: FamilyDescriptor) -> Tensor:
    return {(k, j, i, l): v for (i, j, k, l), v in r_tensor(fam).items()}


def r_t2(fam: FamilyDescriptor) -> Tensor:
    return {(i, l, k, j): v for (i, j, k, l), v in r_tensor(fam).items()}


def first_slot(matrix: Dict[Tuple[int, int], object], N: int) -> Tensor:
    """M (x) I as a four-index tensor."""
    return {(i, j, k, j): v for (i, k), v in matrix.items() for j in range(1, N + 1)}


def second_slot(matrix: Dict[Tuple[int, int], object], N: int) -> Tensor:
    """I (x) M as a four-index tensor."""
    return {(i, j, i, l): v for (j, l), v in matrix.items() for i in range(1, N + 1)}


def check_reflection_equation(fam: FamilyDescriptor) -> List[Tuple[Tuple[int, int, int, int], RatFunc, RatFunc]]:
    """Entries where R J1 R^t1 J2 and J2 R^t1 J1 R differ (empty iff it holds)."""
    N = fam.N
    J = {(r, s): v for r, s, v in fam.j_support()}
    R, Rt1 = r_tensor(fam), r_t1(fam)
    J1, J2 = first_slot(J, N), second_slot(J, N)
    lhs = tensor_mul(tensor_mul(tensor_mul(R, J1), Rt1), J2)
    rhs = tensor_mul(tensor_mul(tensor_mul(J2, Rt1), J1), R)
    bad = []
    for key in sorted(set(lhs) | set(rhs)):
        a, b = lhs.get(key, ZERO), rhs.get(key, ZERO)
        if a != b:
            bad.append((key, a, b))
    return bad

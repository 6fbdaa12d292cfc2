"""Quantum determinants, highest weight vectors, Capelli operators, eigenvalues."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .algebras import AlgebraTower, NotInSubalgebra, build_tower, canonical_generators
from .family import FamilyDescriptor, Kind, Partition, make_partition, partitions_up_to
from .freealg import NCPoly, Terms, Word, add_into, free_mul
from .linalg import determinant, inverse, nullspace
from .scalar import ONE, Q, ZERO, RatFunc, qpow
from .uqmod import (ModuleAction, ModuleError, UExpr, WeightBasis, derive_action_tables, dot,
                    module_closure, simple_root)

DET_BUDGET = 6


class CapelliError(RuntimeError):
    pass


def _inversions(perm: Sequence[int]) -> int:
    return sum(1 for a, b in itertools.combinations(perm, 2) if a > b)


def quantum_determinant(size: int, offset: int = 0, budget: int = DET_BUDGET) -> NCPoly:
    """sum over s of (-q)^{l(s)} t[s(1),1] ... t[s(N),N] on the indices offset+1..offset+size."""
    if size > budget:
        raise CapelliError(f"quantum determinant of size {size} exceeds the budget {budget}")
    terms: Terms = {}
    for perm in itertools.permutations(range(1, size + 1)):
        word = tuple(("t", offset + perm[k], offset + k + 1) for k in range(size))
        length = _inversions(perm)
        terms[word] = qpow(length) * (-1) ** length
    return NCPoly(terms)


@dataclass
class HVector:
    partition: Partition
    poly: NCPoly
    weight: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.partition)


def _rename(p: NCPoly, mapping) -> Terms:
    return {tuple(mapping(g) for g in w): c for w, c in p.terms.items()}


def _normalize(system, terms: Terms) -> NCPoly:
    system._steps = 0
    return NCPoly._raw(system.reduce_terms(system.substitute(terms)))


def highest_block(fam: FamilyDescriptor, r: int) -> NCPoly:
    """The t-polynomial whose square root (or itself) defines the rank-r vector, normalized in the rank-r tower."""
    sub = fam.sub_family(r)
    t = build_tower(sub).t
    if fam.kind is Kind.AI:
        det = quantum_determinant(r)
        return t.mul(det, det)
    if fam.kind is Kind.AII:
        return t.normal_form(quantum_determinant(2 * r))
    return t.mul(quantum_determinant(r), quantum_determinant(r, offset=r))


_H_CACHE: Dict[Tuple, HVector] = {}


def build_H(fam: FamilyDescriptor, r: int) -> HVector:
    if not 1 <= r <= fam.n:
        raise ValueError(f"r must lie in 1..{fam.n}")
    key = (fam.kind, fam.n, (1,) * r)
    hit = _H_CACHE.get(key)
    if hit is not None:
        return hit
    sub = fam.sub_family(r)
    subtower = build_tower(sub)
    try:
        local = subtower.express_in_x(highest_block(fam, r), r, "x")
    except NotInSubalgebra as exc:
        raise CapelliError(f"rank {r} determinant is not in the x-algebra") from exc
    tower = build_tower(fam)
    lifted = _rename(local, lambda g: (g[0], fam.lift_index(r, g[1]), fam.lift_index(r, g[2])))
    poly = _normalize(tower.x, lifted)
    hv = HVector(fam.fundamental(r), poly, fam.weight_2lambda(fam.fundamental(r)))
    _H_CACHE[key] = hv
    return hv


def multiplicities(mu: Partition, n: int) -> List[int]:
    parts = list(mu) + [0] * (n - len(mu))
    return [parts[i] - parts[i + 1] for i in range(n - 1)] + [parts[n - 1]]


def build_H2mu(fam: FamilyDescriptor, mu: Sequence[int]) -> HVector:
    mu = make_partition(mu, fam.n)
    key = (fam.kind, fam.n, mu)
    hit = _H_CACHE.get(key)
    if hit is not None:
        return hit
    tower = build_tower(fam)
    poly = NCPoly.constant(1)
    for r, m in enumerate(multiplicities(mu, fam.n), start=1):
        for _ in range(m):
            poly = tower.x.mul(poly, build_H(fam, r).poly)
    hv = HVector(mu, poly, fam.weight_2lambda(mu))
    _H_CACHE[key] = hv
    return hv


def to_differential(fam: FamilyDescriptor, p: NCPoly) -> NCPoly:
    """Reverse every word and send x[i,j] to d[j,i], normalized in the d-algebra.

    This is the anti-isomorphism from the x-algebra onto the d-algebra; it
    carries highest weight vectors to lowest weight vectors.
    """
    tower = build_tower(fam)
    terms = {tuple(("d", g[2], g[1]) for g in reversed(w)): c for w, c in p.terms.items()}
    return _normalize(tower.d, terms)


def build_Hstar(fam: FamilyDescriptor, mu: Sequence[int]) -> NCPoly:
    return to_differential(fam, build_H2mu(fam, mu).poly)


# -- Capelli operators -------------------------------------------------------

@dataclass
class CapelliOp:
    partition: Partition
    poly: NCPoly
    pairing: RatFunc
    leading: RatFunc
    V: WeightBasis = field(repr=False)
    W: WeightBasis = field(repr=False)

    @property
    def degree(self) -> int:
        return self.poly.degree()


def _coordinate_maps(action: ModuleAction, basis: WeightBasis, op: UExpr) -> List[Dict[int, RatFunc]]:
    return [basis.coordinates(action.act_left(op, v)) for v in basis.vectors]


def _zero_weight_pairs(V: WeightBasis, W: WeightBasis) -> List[Tuple[int, int]]:
    pairs = []
    for wt, vs in sorted(V.by_weight.items()):
        neg = tuple(-x for x in wt)
        for a in vs:
            for b in W.by_weight.get(neg, []):
                pairs.append((a, b))
    return pairs


def _raising_system(action, V, W, pairs, op: str):
    """Rows of the linear map c -> u.(sum c_ab v_a w_b) in V (x) W coordinates.

    E(vw) = (Ev) w + (K_i v)(E w);  F(vw) = (Fv)(K_i^-1 w) + v (F w).
    """
    N = action.N
    index = {p: k for k, p in enumerate(pairs)}
    rows: Dict[Tuple, Dict[int, RatFunc]] = {}
    for i in action.fam.simple_indices():
        alpha = simple_root(N, i)
        u = UExpr.E(i) if op == "E" else UExpr.F(i)
        onV = _coordinate_maps(action, V, u)
        onW = _coordinate_maps(action, W, u)
        wv = [action.weight_of(v) for v in V.vectors]
        ww = [action.weight_of(w) for w in W.vectors]
        for (a, b), col in index.items():
            if op == "E":
                for k, c in onV[a].items():
                    row = rows.setdefault((i, k, b), {})
                    row[col] = row.get(col, ZERO) + c
                s = qpow(dot(alpha, wv[a]))
                for l, c in onW[b].items():
                    row = rows.setdefault((i, a, l), {})
                    row[col] = row.get(col, ZERO) + c * s
            else:
                s = qpow(-dot(alpha, ww[b]))
                for k, c in onV[a].items():
                    row = rows.setdefault((i, k, b), {})
                    row[col] = row.get(col, ZERO) + c * s
                for l, c in onW[b].items():
                    row = rows.setdefault((i, a, l), {})
                    row[col] = row.get(col, ZERO) + c
    return [rows[k] for k in sorted(rows)]


def _assemble(V, W, pairs, coeffs, system) -> NCPoly:
    out: Terms = {}
    for (a, b), c in zip(pairs, coeffs):
        if c:
            add_into(out, free_mul(V.vectors[a].terms, W.vectors[b].terms), c)
    return _normalize(system, out)


_C_CACHE: Dict[Tuple, CapelliOp] = {}


def build_capelli(fam: FamilyDescriptor, lam: Sequence[int], budget: int = 5000) -> CapelliOp:
    """The invariant element of span(V W) acting as the identity on H_{2 lambda}."""
    lam = make_partition(lam, fam.n)
    key = (fam.kind, fam.n, lam)
    hit = _C_CACHE.get(key)
    if hit is not None:
        return hit
    tower = build_tower(fam)
    action = derive_action_tables(tower)
    H = build_H2mu(fam, lam).poly
    Hs = build_Hstar(fam, lam)
    V = module_closure(action, H, action.lowering(), budget)
    W = module_closure(action, Hs, action.raising(), budget)
    pairs = _zero_weight_pairs(V, W)
    rows = _raising_system(action, V, W, pairs, "E")
    matrix = [[row.get(c, ZERO) for c in range(len(pairs))] for row in rows]
    kernel = nullspace(matrix, len(pairs))
    if len(kernel) != 1:
        raise CapelliError(f"invariance solve failed: kernel dimension {len(kernel)} for {lam}")
    coeffs = kernel[0]
    frows = _raising_system(action, V, W, pairs, "F")
    for row in frows:
        if sum((c * coeffs[k] for k, c in row.items()), ZERO):
            raise CapelliError("invariance solve failed: solution is not killed by the lowering operators")
    C = _assemble(V, W, pairs, coeffs, tower.xd)
    image = tower.act_pd_on_p(C, H)
    scale = _proportionality(image, tower.x.normal_form(H))
    if scale is None or not scale:
        raise CapelliError("invariant element does not act by a nonzero scalar on the highest weight vector")
    C = C.scale(scale.inverse())
    pairing = tower.pairing(Hs, H)
    op = CapelliOp(lam, C, pairing, _leading_coefficient(V, W, pairs, coeffs, scale), V, W)
    _C_CACHE[key] = op
    return op


def _leading_coefficient(V, W, pairs, coeffs, scale) -> RatFunc:
    """Coefficient of H_{2 lambda} H*_{2 lambda} (basis vectors 0, 0) in the normalized operator."""
    for (a, b), c in zip(pairs, coeffs):
        if a == 0 and b == 0:
            return c * scale.inverse()
    return ZERO


def _proportionality(p: NCPoly, target: NCPoly) -> Optional[RatFunc]:
    """The scalar s with p = s * target, or None."""
    if not target:
        return None
    if not p:
        return ZERO
    word = next(iter(target.terms))
    s = p.terms.get(word, ZERO) / target.terms[word]
    if (p - target.scale(s)):
        return None
    return s


def capelli_by_dual_basis(fam: FamilyDescriptor, lam: Sequence[int]) -> NCPoly:
    """sum_k v_k w^k with <w^j, v_k> = delta_jk, built from the same two modules."""
    op = build_capelli(fam, lam)
    tower = build_tower(fam)
    V, W = op.V, op.W
    out: Terms = {}
    for wt, vs in sorted(V.by_weight.items()):
        ws = W.by_weight.get(tuple(-x for x in wt), [])
        if len(ws) != len(vs):
            raise CapelliError("weight multiplicities of the two modules differ")
        gram = [[tower.pairing(W.vectors[j], V.vectors[k]) for k in vs] for j in ws]
        try:
            inv = inverse(gram)
        except ZeroDivisionError as exc:
            raise CapelliError("pairing is degenerate on a weight space") from exc
        # w^k = sum_j inv[k][j] w_j
        for kk, k in enumerate(vs):
            for jj, j in enumerate(ws):
                c = inv[kk][jj]
                if c:
                    add_into(out, free_mul(V.vectors[k].terms, W.vectors[j].terms), c)
    return _normalize(tower.xd, out)


def capelli_eigenvalue(fam: FamilyDescriptor, lam: Sequence[int], mu: Sequence[int]) -> RatFunc:
    tower = build_tower(fam)
    C = build_capelli(fam, lam)
    H = build_H2mu(fam, mu).poly
    image = tower.act_pd_on_p(C.poly, H)
    s = _proportionality(image, H)
    if s is None:
        raise CapelliError(f"H_2mu for mu={tuple(mu)} is not an eigenvector of C_{tuple(lam)}")
    return s


def eigen_on_module(fam: FamilyDescriptor, lam, mu) -> List[Optional[RatFunc]]:
    """Scalar by which C_lambda acts on each basis vector of U . H_{2 mu}."""
    tower = build_tower(fam)
    action = derive_action_tables(tower)
    C = build_capelli(fam, lam)
    V = module_closure(action, build_H2mu(fam, mu).poly, action.lowering())
    return [_proportionality(tower.act_pd_on_p(C.poly, v), v) for v in V.vectors]


# -- pairing ------------------------------------------------------------------

def gram_blocks(fam: FamilyDescriptor, degree: int) -> Dict[Tuple[int, ...], List[List[RatFunc]]]:
    """Per weight, the matrix <d-monomial, x-monomial> on ordered monomials of the given degree."""
    tower = build_tower(fam)
    xs = tower.x.ordered_words(degree)
    ds = tower.d.ordered_words(degree)
    out = {}
    for wt in sorted({tower.x_weight(w) for w in xs}):
        xw = [w for w in xs if tower.x_weight(w) == wt]
        dw = [w for w in ds if tower.x_weight(w) == tuple(-a for a in wt)]
        out[wt] = [[tower.pairing(NCPoly.of_word(d), NCPoly.of_word(x)) for x in xw] for d in dw]
    return out


def cross_degree_pairings(fam: FamilyDescriptor, max_degree: int) -> List[Tuple[Word, Word, RatFunc]]:
    """Nonzero pairings between monomials of different degrees (expected none)."""
    tower = build_tower(fam)
    bad = []
    for r in range(max_degree + 1):
        for s in range(max_degree + 1):
            if r == s:
                continue
            for d in tower.d.ordered_words(r):
                for x in tower.x.ordered_words(s):
                    v = tower.pairing(NCPoly.of_word(d), NCPoly.of_word(x))
                    if v:
                        bad.append((d, x, v))
    return bad


# -- Cartan elements ------------------------------------------------------------

@dataclass
class CartanCandidate:
    label: str
    element: NCPoly
    index: int  # s in K_{2 eps_s} - 1
    labels_as_printed: bool = False  # diagonal pairing of element and K exactly as displayed


def _xd(i, j):
    return (("x", i, j), ("d", i, j))


def cartan_elements(fam: FamilyDescriptor, constants: str = "printed") -> List[CartanCandidate]:
    """The elements X of the K_{2 eps_N} - 1 identity, with every index reading.

    ``constants='derived'`` rescales each x d summand by (printed / derived)
    cross constant, which is the form the identity takes once the derived
    constants are used.
    """
    n, N = fam.n, fam.N
    tower = build_tower(fam)
    pre = qpow(2) - 1

    def weight(a, b):
        return _ratio(tower, a, b) if constants == "derived" else ONE

    out = []
    if fam.kind is Kind.AI:
        terms = {_xd(n, n): (qpow(3) + Q) * weight(n, n)}
        for a in range(1, n):
            terms[_xd(a, n)] = weight(a, n)
        out.append(CartanCandidate("AI", NCPoly(terms).scale(pre), N))
    elif fam.kind is Kind.AII:
        terms = {_xd(a, N): weight(a, N) for a in range(1, N)}
        out.append(CartanCandidate("AII", NCPoly(terms).scale(pre), N))
    else:
        col = NCPoly({_xd(a, 2 * n): weight(a, 2 * n) for a in range(1, n + 1)}).scale(pre)
        row = NCPoly({_xd(n, a + n): weight(n, a + n) for a in range(1, n + 1)}).scale(pre)
        out.append(CartanCandidate("diagonal, x[a,2n] d[a,2n], K_2eps_2n", col, 2 * n))
        out.append(CartanCandidate("diagonal, x[n,a+n] d[n,a+n], K_2eps_n", row, n))
        out.append(CartanCandidate("diagonal, x[a,2n] d[a,2n], K_2eps_n", col, n, True))
        out.append(CartanCandidate("diagonal, x[n,a+n] d[n,a+n], K_2eps_2n", row, 2 * n, True))
    return out


def _ratio(tower: AlgebraTower, a: int, b: int) -> RatFunc:
    from .algebras import printed_constant
    derived = tower.cross_constants[(a, b)]
    return printed_constant(a, b, a, b) / derived


def check_cartan_element(fam: FamilyDescriptor, cand: CartanCandidate, max_degree: int = 4) -> List[Tuple[Word, NCPoly]]:
    """Monomials p (degree <= max_degree) with X . p != (K_{2 eps_s} - 1) . p."""
    tower = build_tower(fam)
    bad = []
    for r in range(max_degree + 1):
        for w in tower.x.ordered_words(r):
            p = NCPoly.of_word(w)
            count = tower.x_weight(w)[cand.index - 1]
            expected = p.scale(qpow(2 * count) - 1)
            got = tower.act_pd_on_p(cand.element, p)
            if got - expected:
                bad.append((w, got))
    return bad

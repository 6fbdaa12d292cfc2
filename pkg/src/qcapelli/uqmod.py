"""Actions of the quantum group on the algebras of a family.

Generators act on t and del by the standard formulas; the actions on x and
d are derived by pushing those formulas through the embeddings.  Longer
words are handled with the coproduct, so every algebra here is a module
algebra.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .algebras import AlgebraTower, NotInSubalgebra, canonical_generators
from .family import FamilyDescriptor, Kind
from .freealg import Gen, NCPoly, RewriteSystem, Terms, Word, add_into
from .linalg import Echelon, solve
from .scalar import ONE, Q, QINV, ZERO, RatFunc, qpow

UGen = Tuple  # ("E", i) | ("F", i) | ("K", beta)


class ModuleError(RuntimeError):
    pass


def simple_root(N: int, i: int) -> Tuple[int, ...]:
    beta = [0] * N
    beta[i - 1], beta[i] = 1, -1
    return tuple(beta)


def dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


class UExpr:
    """A Q(q)-linear combination of words in E_i, F_i and K_beta.

    A word u1 u2 ... uk acts on the left as u1 . (u2 . (... uk . v)) and on
    the right as ((v . u1) . u2) ... uk.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Tuple[UGen, ...], RatFunc]] = None):
        self.terms: Dict[Tuple[UGen, ...], RatFunc] = {}
        for w, c in (terms or {}).items():
            c = RatFunc.coerce(c)
            if c:
                self.terms[tuple(w)] = self.terms.get(tuple(w), ZERO) + c

    @staticmethod
    def E(i: int) -> "UExpr":
        return UExpr({(("E", i),): ONE})

    @staticmethod
    def F(i: int) -> "UExpr":
        return UExpr({(("F", i),): ONE})

    @staticmethod
    def K(beta: Sequence[int]) -> "UExpr":
        return UExpr({(("K", tuple(beta)),): ONE})

    @staticmethod
    def one() -> "UExpr":
        return UExpr({(): ONE})

    def __add__(self, other: "UExpr") -> "UExpr":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, ZERO) + c
        return UExpr(out)

    def __neg__(self):
        return UExpr({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "UExpr":
        c = RatFunc.coerce(c)
        return UExpr({w: v * c for w, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (RatFunc, int)):
            return self.scale(other)
        out: Dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                out[w1 + w2] = out.get(w1 + w2, ZERO) + c1 * c2
        return UExpr(out)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        """Equality as formal combinations of words (no relations applied)."""
        if not isinstance(other, UExpr):
            return NotImplemented
        return {w: c for w, c in self.terms.items() if c} == {w: c for w, c in other.terms.items() if c}

    __hash__ = None

    def counit(self) -> RatFunc:
        total = ZERO
        for w, c in self.terms.items():
            if all(g[0] == "K" for g in w):
                total = total + c
        return total

    def __str__(self):
        def g(u):
            if u[0] == "K":
                return "K(" + ",".join(str(b) for b in u[1]) + ")"
            return f"{u[0]}{u[1]}"
        pieces = [f"({c})*" + "".join(g(u) for u in w) if w else f"({c})" for w, c in sorted(self.terms.items(), key=repr)]
        return " + ".join(pieces) or "0"

    __repr__ = __str__


def q_commutator(a: UExpr, b: UExpr) -> UExpr:
    """[a, b]_q = ab - q ba."""
    return a * b - (b * a).scale(Q)


def parse_uexpr(text: str, N: int) -> UExpr:
    """Parse a product of generator names such as "E1", "F2 K1^-1" or "K(1,0,-1)"."""
    import re
    out = UExpr.one()
    for token in text.replace("*", " ").split():
        m = re.fullmatch(r"([EF])(\d+)", token)
        if m:
            out = out * (UExpr.E(int(m.group(2))) if m.group(1) == "E" else UExpr.F(int(m.group(2))))
            continue
        m = re.fullmatch(r"K(\d+)(?:\^(-?\d+))?", token)
        if m:
            i, p = int(m.group(1)), int(m.group(2) or 1)
            out = out * UExpr.K(tuple(p * b for b in simple_root(N, i)))
            continue
        m = re.fullmatch(r"K\(([-\d,\s]+)\)", token)
        if m:
            beta = tuple(int(b) for b in m.group(1).split(","))
            if len(beta) != N:
                raise ValueError(f"weight {beta} must have {N} coordinates")
            out = out * UExpr.K(beta)
            continue
        raise ValueError(f"cannot parse operator {token!r}")
    return out


class ModuleAction:
    """Left and right actions of E_i, F_i, K_beta on one family's algebras."""

    def __init__(self, tower: AlgebraTower):
        self.tower = tower
        self.fam = tower.fam
        self.N = tower.fam.N
        self._tables: Dict[Tuple[str, str, int, Gen], Terms] = {}
        self._memo: Dict[Tuple, Terms] = {}

    # validation
    def check_gen(self, u: UGen) -> None:
        if u[0] in ("E", "F"):
            if u[1] not in self.fam.simple_indices():
                raise ValueError(f"{u[0]}{u[1]} is not a generator for {self.fam}")
        elif u[0] == "K":
            if len(u[1]) != self.N:
                raise ValueError("K weight has wrong length")
        else:
            raise ValueError(f"unknown generator {u}")

    # weights
    def gen_weight(self, g: Gen, side: str = "left") -> Tuple[int, ...]:
        kind, i, j = g
        w = [0] * self.N
        if kind in ("x", "d"):
            s = 1 if kind == "x" else -1
            w[i - 1] += s
            w[j - 1] += s
        else:
            s = 1 if kind == "t" else -1
            w[(i if side == "left" else j) - 1] += s
        return tuple(w)

    def word_weight(self, word: Word, side: str = "left") -> Tuple[int, ...]:
        w = [0] * self.N
        for g in word:
            for k, v in enumerate(self.gen_weight(g, side)):
                w[k] += v
        return tuple(w)

    def weight_of(self, p: NCPoly, side: str = "left") -> Tuple[int, ...]:
        weights = {self.word_weight(w, side) for w in p.terms}
        if len(weights) > 1:
            raise ModuleError("element is not weight-homogeneous")
        return weights.pop() if weights else tuple([0] * self.N)

    # generator actions
    def _t_like(self, kind: str, i: int, j: int) -> Terms:
        if 1 <= i <= self.N and 1 <= j <= self.N and not self.fam.t_vanishes(i, j):
            return {((kind, i, j),): ONE}
        return {}

    def act_on_t(self, u: UGen, side: str, g: Gen) -> Terms:
        """Image of a single t or del generator."""
        kind, i, j = g
        op, k = u[0], u[1]
        if op == "K":
            return {(g,): qpow(dot(k, self.gen_weight(g, side)))}
        if kind == "t":
            if side == "left":
                if op == "E":
                    return self._t_like("t", i - 1, j) if i - 1 == k else {}
                return self._t_like("t", i + 1, j) if i == k else {}
            if op == "E":
                return self._t_like("t", i, j + 1) if j == k else {}
            return self._t_like("t", i, j - 1) if j - 1 == k else {}
        if side == "left":
            if op == "E":
                return {w: -QINV for w in self._t_like("del", i + 1, j)} if i == k else {}
            return {w: -Q for w in self._t_like("del", i - 1, j)} if i - 1 == k else {}
        if op == "E":
            return {w: -Q for w in self._t_like("del", i, j - 1)} if j - 1 == k else {}
        return {w: -QINV for w in self._t_like("del", i, j + 1)} if j == k else {}

    def table(self, op: str, k: int, g: Gen) -> Terms:
        """E_k or F_k applied to a canonical x or d generator, as x/d terms."""
        key = ("left", op, k, g)
        hit = self._tables.get(key)
        if hit is not None:
            return hit
        kind, i, j = g
        base = self.tower.t if kind == "x" else self.tower.del_
        image: Terms = {}
        for w, c in self.tower.embed_generator(kind, i, j).items():
            add_into(image, self._act_word_raw((op, k), w, "left", base), c)
        try:
            expressed = self.tower.express_in_x(NCPoly._raw(image), 1, kind)
        except NotInSubalgebra as exc:
            raise ModuleError(f"{op}{k} . {kind}[{i},{j}] left the generator span") from exc
        self._tables[key] = expressed.terms
        return expressed.terms

    def gen_image(self, u: UGen, g: Gen, side: str) -> Terms:
        if u[0] == "K":
            return {(g,): qpow(dot(u[1], self.gen_weight(g, side)))}
        if g[0] in ("t", "del"):
            return self.act_on_t(u, side, g)
        if side != "left":
            raise ModuleError("right actions are computed through the t-embedding")
        return self.table(u[0], u[1], g)

    # words
    def system_for(self, word: Word) -> RewriteSystem:
        kinds = {g[0] for g in word}
        if not kinds or kinds <= {"x"}:
            return self.tower.x
        if kinds <= {"d"}:
            return self.tower.d
        if kinds <= {"x", "d"}:
            return self.tower.xd
        if kinds <= {"t"}:
            return self.tower.t
        if kinds <= {"del"}:
            return self.tower.del_
        raise ModuleError(f"mixed generator kinds {sorted(kinds)}")

    def _act_word_raw(self, u: UGen, word: Word, side: str, system: RewriteSystem) -> Terms:
        """Module-algebra rule on one word, normalized in ``system``."""
        op = u[0]
        if op == "K":
            return {word: qpow(dot(u[1], self.word_weight(word, side)))}
        alpha = simple_root(self.N, u[1])
        raw: Terms = {}
        r = len(word)
        prefix_w = [0] * (r + 1)
        weights = [dot(alpha, self.gen_weight(g, side)) for g in word]
        for p in range(r):
            prefix_w[p + 1] = prefix_w[p] + weights[p]
        total = prefix_w[r]
        for p, g in enumerate(word):
            img = self.gen_image(u, g, side)
            if not img:
                continue
            if op == "E":
                factor = qpow(prefix_w[p])
            else:
                factor = qpow(-(total - prefix_w[p + 1]))
            for gw, gc in img.items():
                nw = word[:p] + gw + word[p + 1:]
                raw[nw] = raw.get(nw, ZERO) + gc * factor
        raw = {w: c for w, c in raw.items() if c}
        system._steps = 0
        return system.reduce_terms(system.substitute(raw))

    def act_gen_on_word(self, u: UGen, word: Word, side: str = "left") -> Terms:
        key = (u, word, side)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._act_word_raw(u, word, side, self.system_for(word))
            self._memo[key] = hit
        return hit

    def act_gen(self, u: UGen, p: Mapping[Word, RatFunc], side: str = "left") -> Terms:
        out: Terms = {}
        for w, c in p.items():
            add_into(out, self.act_gen_on_word(u, w, side), c)
        return out

    def act_left(self, u: Union[UExpr, UGen], p: NCPoly) -> NCPoly:
        u = u if isinstance(u, UExpr) else UExpr({(u,): ONE})
        out: Terms = {}
        for word, c in u.terms.items():
            cur = p.terms
            for g in reversed(word):
                self.check_gen(g)
                cur = self.act_gen(g, cur, "left")
                if not cur:
                    break
            add_into(out, cur, c)
        return NCPoly._raw(out)

    def act_right(self, p: NCPoly, u: Union[UExpr, UGen]) -> NCPoly:
        u = u if isinstance(u, UExpr) else UExpr({(u,): ONE})
        out: Terms = {}
        for word, c in u.terms.items():
            cur = p.terms
            for g in word:
                self.check_gen(g)
                cur = self.act_gen(g, cur, "right")
                if not cur:
                    break
            add_into(out, cur, c)
        return NCPoly._raw(out)

    # operators on degree-one spaces
    def degree_one_matrix(self, u: UExpr, kind: str = "x") -> List[List[RatFunc]]:
        gens = canonical_generators(self.fam, kind)
        index = {(g,): k for k, g in enumerate(gens)}
        cols = []
        for g in gens:
            img = self.act_left(u, NCPoly({(g,): ONE})).terms
            cols.append(img)
        return [[cols[c].get(w, ZERO) for c in range(len(gens))] for w in index]

    # the coideal subalgebra
    def raising(self) -> List[UExpr]:
        return [UExpr.E(i) for i in self.fam.simple_indices()]

    def lowering(self) -> List[UExpr]:
        return [UExpr.F(i) for i in self.fam.simple_indices()]


def Ki(N: int, i: int, power: int = 1) -> UExpr:
    return UExpr.K(tuple(power * b for b in simple_root(N, i)))


# Scalar in front of the nested q-commutator in the AII generators.  Under the
# action conventions above, invariance of every x_ij forces q^-1.
AII_BRACKET_SCALAR = QINV


def btheta_generators(fam: FamilyDescriptor) -> List[Tuple[str, UExpr]]:
    N, n = fam.N, fam.n
    gens: List[Tuple[str, UExpr]] = []
    if fam.kind is Kind.AI:
        for i in range(1, n):
            gens.append((f"F{i} - E{i} K{i}^-1", UExpr.F(i) - UExpr.E(i) * Ki(N, i, -1)))
    elif fam.kind is Kind.AII:
        for i in range(1, N, 2):
            gens += [(f"K{i}", Ki(N, i)), (f"K{i}^-1", Ki(N, i, -1)), (f"E{i}", UExpr.E(i)), (f"F{i}", UExpr.F(i))]
        for i in range(2, N - 1, 2):
            inner = q_commutator(UExpr.E(i + 1), UExpr.E(i))
            outer = q_commutator(UExpr.E(i - 1), inner)
            gens.append((f"B{i}", UExpr.F(i) - (outer * Ki(N, i, -1)).scale(AII_BRACKET_SCALAR)))
    else:
        for i in range(1, n):
            gens.append((f"B{i}", UExpr.F(i) - (UExpr.E(n + i) * Ki(N, i, -1)).scale(Q)))
            gens.append((f"B{n + i}", UExpr.F(n + i) - (UExpr.E(i) * Ki(N, n + i, -1)).scale(Q)))
        for j in range(1, n + 1):
            beta = [0] * N
            beta[j - 1], beta[n + j - 1] = -1, 1
            gens.append((f"K(-e{j}+e{n + j})", UExpr.K(beta)))
            gens.append((f"K(e{j}-e{n + j})", UExpr.K([-b for b in beta])))
    return gens


def check_btheta_invariance(action: ModuleAction) -> List[Tuple[Gen, str, NCPoly]]:
    """Pairs (x generator, B generator) where x . b differs from counit(b) x."""
    tower = action.tower
    bad = []
    for g in canonical_generators(action.fam, "x"):
        embedded = NCPoly._raw(tower.t.reduce_terms(tower.embed_generator("x", g[1], g[2])))
        for name, b in btheta_generators(action.fam):
            image = action.act_right(embedded, b)
            diff = image - embedded.scale(b.counit())
            diff = tower.t.normal_form(diff)
            if diff:
                bad.append((g, name, diff))
    return bad


class ClosureBudgetExceeded(ModuleError):
    pass


class WeightBasis:
    """A basis of a weight-graded subspace, grouped by weight."""

    def __init__(self, action: ModuleAction, rank=None):
        self.action = action
        self.vectors: List[NCPoly] = []
        self.by_weight: Dict[Tuple[int, ...], List[int]] = defaultdict(list)
        self._ech: Dict[Tuple[int, ...], Echelon] = {}
        self._rank = rank

    def _order(self):
        rank = self._rank
        if rank is None:
            return lambda w: tuple(-k for k in range(0))  # unused
        return lambda w: tuple(-rank[g] for g in w)

    def try_add(self, vec: NCPoly) -> bool:
        if not vec:
            return False
        wt = self.action.weight_of(vec)
        ech = self._ech.get(wt)
        if ech is None:
            ech = self._ech[wt] = Echelon(order=_word_order)
        if ech.add(vec.terms) is None:
            return False
        self.by_weight[wt].append(len(self.vectors))
        self.vectors.append(vec)
        return True

    def coordinates(self, vec: NCPoly) -> Dict[int, RatFunc]:
        """Coefficients of vec in this basis (vec must lie in the span)."""
        if not vec:
            return {}
        wt = self.action.weight_of(vec)
        idx = self.by_weight.get(wt, [])
        if not idx:
            raise ModuleError("vector is not in the span")
        rows = sorted({w for k in idx for w in self.vectors[k].terms} | set(vec.terms), key=_word_order)
        matrix = [[self.vectors[k].terms.get(r, ZERO) for k in idx] for r in rows]
        sol = solve(matrix, [vec.terms.get(r, ZERO) for r in rows])
        if sol is None:
            raise ModuleError("vector is not in the span")
        return {k: c for k, c in zip(idx, sol) if c}

    def __len__(self):
        return len(self.vectors)


def _word_order(w: Word):
    return (len(w), tuple((g[0], g[1], g[2]) for g in w))


def module_closure(action: ModuleAction, seed: NCPoly, ops: Sequence[UExpr], budget: int = 5000) -> WeightBasis:
    """Breadth-first closure of span{seed} under the given operators."""
    basis = WeightBasis(action)
    if not seed:
        return basis
    basis.try_add(seed)
    frontier = [seed]
    while frontier:
        nxt = []
        for v in frontier:
            for u in ops:
                image = action.act_left(u, v)
                if image and basis.try_add(image):
                    nxt.append(image)
                    if len(basis) > budget:
                        raise ClosureBudgetExceeded(f"module closure exceeded {budget} vectors")
        frontier = nxt
    return basis


def operator_matrix(action: ModuleAction, u: UExpr, basis: WeightBasis) -> Dict[Tuple[int, int], RatFunc]:
    """Sparse matrix of u on a u-stable basis: entry (row, col)."""
    out = {}
    for col, v in enumerate(basis.vectors):
        for row, c in basis.coordinates(action.act_left(u, v)).items():
            out[(row, col)] = c
    return out


_ACTIONS: Dict[Tuple, ModuleAction] = {}


def derive_action_tables(tower: AlgebraTower) -> ModuleAction:
    key = (tower.fam.kind, tower.fam.n, id(tower))
    act = _ACTIONS.get(key)
    if act is None:
        act = ModuleAction(tower)
        for kind in ("x", "d"):
            for g in canonical_generators(tower.fam, kind):
                for i in tower.fam.simple_indices():
                    act.table("E", i, g)
                    act.table("F", i, g)
        _ACTIONS[key] = act
    return act

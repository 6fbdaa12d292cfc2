"""Concrete algebras of a family: O_q(Mat_N), its opposite, P, D and PD.

Every rule set is derived by linear algebra from the matrix relations; none
is typed in by hand.
"""

from __future__ import annotations

from collections import defaultdict
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .family import FamilyDescriptor, Kind, build_family, first_slot, r_t1, r_t2, r_tensor, second_slot, tensor_mul
from .freealg import (Gen, IncompletePresentation, NCPoly, RewriteError, RewriteSystem, Terms, Word, add_into,
                      check_local_confluence, derive_rewrite_rules, free_mul, gen_str)
from .linalg import Echelon, solve
from .scalar import ONE, ZERO, RatFunc, qpow


class NotInSubalgebra(ValueError):
    """Raised when a t-polynomial is not in the image of the x-embedding."""


# ---------------------------------------------------------------- t and del

def t_generators(fam: FamilyDescriptor, kind: str = "t") -> List[Gen]:
    N = fam.N
    return [(kind, i, j) for i in range(1, N + 1) for j in range(1, N + 1) if not fam.t_vanishes(i, j)]


def t_matrix_relations(fam: FamilyDescriptor) -> List[Terms]:
    """Entries of R T1 T2 - T2 T1 R, with R the family's R-matrix."""
    N = fam.N
    R = r_tensor(fam)
    by_upper = defaultdict(list)
    by_lower = defaultdict(list)
    for (i, j, k, l), v in R.items():
        by_upper[(i, j)].append((k, l, v))
        by_lower[(k, l)].append((i, j, v))

    def t(i, j):
        return None if fam.t_vanishes(i, j) else ("t", i, j)

    rels = []
    for i, j, k, l in product(range(1, N + 1), repeat=4):
        rel: Terms = {}
        for m, p, v in by_upper[(i, j)]:
            a, b = t(m, k), t(p, l)
            if a and b:
                add_into(rel, {(a, b): v})
        for m, p, v in by_lower[(k, l)]:
            a, b = t(j, p), t(i, m)
            if a and b:
                add_into(rel, {(a, b): -v})
        if rel:
            rels.append(rel)
    return rels


def reverse_terms(terms: Mapping[Word, RatFunc], rename: Optional[str] = None) -> Terms:
    out: Terms = {}
    for w, c in terms.items():
        nw = tuple((rename or g[0], g[1], g[2]) for g in reversed(w))
        add_into(out, {nw: c})
    return out


def build_t_system(fam: FamilyDescriptor) -> RewriteSystem:
    return derive_rewrite_rules(t_matrix_relations(fam), t_generators(fam), name=f"O_q(Mat) for {fam}")


def build_del_system(fam: FamilyDescriptor) -> RewriteSystem:
    rels = [reverse_terms(r, "del") for r in t_matrix_relations(fam)]
    return derive_rewrite_rules(rels, t_generators(fam, "del"), name=f"O_q(Mat)^op for {fam}")


# ---------------------------------------------------------------- P and D

def canonical_generators(fam: FamilyDescriptor, kind: str) -> List[Gen]:
    return [(kind, i, j) for i, j in fam.canonical]


def linear_substitutions(fam: FamilyDescriptor, kind: str) -> Dict[Gen, Terms]:
    gamma = fam.gamma_x if kind == "x" else fam.gamma_d
    subs: Dict[Gen, Terms] = {}
    for i, j in product(range(1, fam.N + 1), repeat=2):
        if (i, j) in fam._canonical_set:
            continue
        subs[(kind, i, j)] = {((kind, a, b),): c for c, (a, b) in fam.linear_form(i, j, gamma)}
    return subs


def _symbol_matrix(fam: FamilyDescriptor, kind: str) -> Dict[Tuple[int, int], NCPoly]:
    N = fam.N
    return {(i, j): NCPoly.generator(kind, i, j) for i in range(1, N + 1) for j in range(1, N + 1)}


def _tensor_relations(lhs, rhs) -> List[Terms]:
    rels = []
    for key in set(lhs) | set(rhs):
        diff = lhs.get(key, NCPoly()) - rhs.get(key, NCPoly())
        if diff:
            rels.append(diff.terms)
    rels.sort(key=lambda t: sorted((len(w), w) for w in t))
    return rels


def x_matrix_relations(fam: FamilyDescriptor) -> List[Terms]:
    """Entries of R X1 R^t1 X2 - X2 R^t1 X1 R over the raw symbols x[i,j]."""
    N = fam.N
    X = _symbol_matrix(fam, "x")
    X1, X2 = first_slot(X, N), second_slot(X, N)
    R, Rt1 = r_tensor(fam), r_t1(fam)
    z = NCPoly()
    lhs = tensor_mul(tensor_mul(tensor_mul(R, X1, z), Rt1, z), X2, z)
    rhs = tensor_mul(tensor_mul(tensor_mul(X2, Rt1, z), X1, z), R, z)
    return _tensor_relations(lhs, rhs)


def d_matrix_relations(fam: FamilyDescriptor) -> List[Terms]:
    """Entries of R D2 R^t2 D1 - D1 R^t2 D2 R over the raw symbols d[i,j].

    The partial transpose sits in the second slot; this is the reading under
    which the relations agree with the kernel of the del-embedding.
    """
    N = fam.N
    D = _symbol_matrix(fam, "d")
    D1, D2 = first_slot(D, N), second_slot(D, N)
    R, Rt2 = r_tensor(fam), r_t2(fam)
    z = NCPoly()
    lhs = tensor_mul(tensor_mul(tensor_mul(R, D2, z), Rt2, z), D1, z)
    rhs = tensor_mul(tensor_mul(tensor_mul(D1, Rt2, z), D2, z), R, z)
    return _tensor_relations(lhs, rhs)


def _by_lower(tensor) -> Dict[Tuple[int, int], List[Tuple[int, int, RatFunc]]]:
    out = defaultdict(list)
    for (i, j, k, l), v in tensor.items():
        out[(k, l)].append((i, j, v))
    return out


def cross_quadratic(fam: FamilyDescriptor, a: int, b: int, e: int, f: int, lower=None) -> Terms:
    """The quadratic part of the twisting relation for d[a,b] x[e,f], as the
    combination d[a,b] x[e,f] - sum(...) x[p,w] d[r,y]."""
    lower = lower or _by_lower(r_t2(fam))
    rhs: Terms = {}
    for m, l, c1 in lower[(e, b)]:
        for p, qq, c2 in lower[(m, a)]:
            for x, y, c3 in lower[(f, l)]:
                for w, r, c4 in lower[(x, qq)]:
                    add_into(rhs, {(("x", p, w), ("d", r, y)): c1 * c2 * c3 * c4})
    rel: Terms = {(("d", a, b), ("x", e, f)): ONE}
    add_into(rel, rhs, -ONE)
    return rel


def printed_constant(a: int, b: int, e: int, f: int) -> RatFunc:
    """The constant term q^(-delta_ef) delta_ae delta_bf of the twisting relation."""
    if a == e and b == f:
        return qpow(-1 if e == f else 0)
    return ZERO


def cross_relation(fam: FamilyDescriptor, a: int, b: int, e: int, f: int, lower=None,
                   constant: Optional[RatFunc] = None) -> Terms:
    """The full twisting relation; ``constant`` overrides the printed constant."""
    rel = cross_quadratic(fam, a, b, e, f, lower)
    c = printed_constant(a, b, e, f) if constant is None else constant
    if c:
        add_into(rel, {(): -c})
    return rel


def cross_relation_diagonal(fam: FamilyDescriptor, a: int, b: int, e: int, f: int, lower=None) -> Terms:
    """The simplified diagonal-family form, with R the rank-n standard R-matrix."""
    n = fam.n
    small = build_family(Kind.AI, n)
    lower = lower or _by_lower(r_t2(small))
    rel: Terms = {(("d", a, b + n), ("x", e, f + n)): ONE}
    for r, l, c1 in lower[(e, a)]:
        for j, k, c2 in lower[(f, b)]:
            add_into(rel, {(("x", r, j + n), ("d", l, k + n)): -c1 * c2})
    if a == e and b == f:
        add_into(rel, {(): -ONE})
    return rel


class AlgebraTower:
    """All rewrite systems and maps attached to one family."""

    def __init__(self, fam: FamilyDescriptor, step_budget: int = 10 ** 6):
        self.fam = fam
        self.step_budget = step_budget
        self._t = self._del = self._x = self._d = self._xd = None
        self._constants = None
        self._embed_memo: Dict[Tuple[str, Word], Terms] = {}
        self._proj_memo: Dict[Tuple[Gen, Word], Terms] = {}

    # systems
    @property
    def t(self) -> RewriteSystem:
        if self._t is None:
            self._t = build_t_system(self.fam)
        return self._t

    @property
    def del_(self) -> RewriteSystem:
        if self._del is None:
            self._del = build_del_system(self.fam)
        return self._del

    @property
    def x(self) -> RewriteSystem:
        if self._x is None:
            self._x = derive_rewrite_rules(
                x_matrix_relations(self.fam), canonical_generators(self.fam, "x"),
                substitutions=linear_substitutions(self.fam, "x"), name=f"P for {self.fam}",
                step_budget=self.step_budget)
        return self._x

    @property
    def d(self) -> RewriteSystem:
        if self._d is None:
            self._d = derive_rewrite_rules(
                d_matrix_relations(self.fam), canonical_generators(self.fam, "d"),
                substitutions=linear_substitutions(self.fam, "d"), name=f"D for {self.fam}",
                step_budget=self.step_budget)
        return self._d

    @property
    def xd(self) -> RewriteSystem:
        if self._xd is None:
            self._xd = self._build_xd()
        return self._xd

    def cross_relations(self, constants: Optional[Mapping[Tuple[int, int], RatFunc]] = None) -> List[Terms]:
        """Twisting relations over canonical index pairs.

        ``constants`` maps a canonical pair (a, b) to the constant term of
        d[a,b] x[a,b]; by default the consistent constants are used.
        """
        if constants is None:
            constants = self.cross_constants
        fam = self.fam
        lower = _by_lower(r_t2(fam))
        rels = []
        for a, b in fam.canonical:
            for e, f in fam.canonical:
                c = constants.get((a, b), ZERO) if (a, b) == (e, f) else ZERO
                rels.append(cross_relation(fam, a, b, e, f, lower, constant=c))
        return rels

    def _xd_with(self, constants) -> RewriteSystem:
        xs = canonical_generators(self.fam, "x")
        ds = canonical_generators(self.fam, "d")
        subs = {**linear_substitutions(self.fam, "x"), **linear_substitutions(self.fam, "d")}
        extra = {**self.x.rules, **self.d.rules}
        return derive_rewrite_rules(
            self.cross_relations(constants), xs + ds, substitutions=subs, extra_rules=extra,
            name=f"PD for {self.fam}", step_budget=self.step_budget)

    @property
    def printed_constants(self) -> Dict[Tuple[int, int], RatFunc]:
        return {(a, b): printed_constant(a, b, a, b) for a, b in self.fam.canonical}

    @property
    def cross_constants(self) -> Dict[Tuple[int, int], RatFunc]:
        """Constant terms of d[a,b] x[a,b] for which the algebra is a PBW deformation.

        The quadratic part of the twisting relation leaves a one-dimensional
        space of consistent constants (degree-1 parts of all overlaps must
        agree).  It is normalized to the printed constant on the first
        canonical pair.
        """
        if getattr(self, "_constants", None) is None:
            self._constants = self._solve_constants()
        return self._constants

    def _overlap_words(self) -> List[Word]:
        xs = canonical_generators(self.fam, "x")
        ds = canonical_generators(self.fam, "d")
        words = [(d, g, h) for d in ds for (g, h) in self.x.rules]
        words += [(g, h, x) for (g, h) in self.d.rules for x in xs]
        return words

    def _degree_one_defects(self, rs: RewriteSystem, words) -> Terms:
        out: Terms = {}
        for w in words:
            results = []
            for p in (0, 1):
                rhs = rs.rules[(w[p], w[p + 1])]
                expanded = {w[:p] + rw + w[p + 2:]: c for rw, c in rhs.items()}
                rs._steps = 0
                results.append(rs.reduce_terms(expanded))
            diff = dict(results[0])
            add_into(diff, results[1], -ONE)
            for k, v in diff.items():
                out[(w, k)] = v
        return out

    def _solve_constants(self) -> Dict[Tuple[int, int], RatFunc]:
        from .linalg import nullspace
        keys = list(self.fam.canonical)
        words = self._overlap_words()
        if self._degree_one_defects(self._xd_with({}), words):
            raise RewriteError(f"quadratic twisting relations are inconsistent for {self.fam}")
        columns = [self._degree_one_defects(self._xd_with({k: ONE}), words) for k in keys]
        rows = sorted({r for col in columns for r in col}, key=repr)
        if not rows:
            # every choice is consistent; keep the printed constants
            return self.printed_constants
        matrix = [[col.get(r, ZERO) for col in columns] for r in rows]
        basis = nullspace(matrix, len(keys))
        if len(basis) != 1:
            raise RewriteError(f"expected a one-dimensional space of constants, found {len(basis)}")
        vec = basis[0]
        scale = self.printed_constants[keys[0]] / vec[0]
        return {k: v * scale for k, v in zip(keys, vec)}

    def _build_xd(self) -> RewriteSystem:
        return self._xd_with(self.cross_constants)

    def system(self, which: str) -> RewriteSystem:
        return {"t": lambda: self.t, "del": lambda: self.del_, "x": lambda: self.x,
                "d": lambda: self.d, "xd": lambda: self.xd}[which]()

    def confluence_report(self, which: Iterable[str] = ("t", "del", "x", "d", "xd")) -> Dict[str, list]:
        return {w: check_local_confluence(self.system(w), 3) for w in which}

    # embeddings
    def embed_generator(self, kind: str, i: int, j: int) -> Terms:
        """x[i,j] as a t-polynomial or d[i,j] as a del-polynomial (not normalized)."""
        fam = self.fam
        if not (1 <= i <= fam.N and 1 <= j <= fam.N):
            raise ValueError(f"index ({i},{j}) out of range")
        base = "t" if kind == "x" else "del"
        out: Terms = {}
        for r, s, J in fam.j_support():
            if fam.t_vanishes(i, r) or fam.t_vanishes(j, s):
                continue
            c = J if kind == "x" else J * qpow(-2 * fam.shat(r))
            add_into(out, {((base, i, r), (base, j, s)): c})
        return out

    def embed_word(self, word: Word) -> Terms:
        """Normal form in O_q(Mat) (or its opposite) of a word in x (or d)."""
        if not word:
            return {(): ONE}
        kind = word[0][0]
        key = (kind, word)
        hit = self._embed_memo.get(key)
        if hit is not None:
            return hit
        system = self.t if kind == "x" else self.del_
        head = self.embed_generator(kind, word[0][1], word[0][2])
        tail = self.embed_word(word[1:])
        out: Terms = {}
        for hw, hc in head.items():
            part = dict(tail)
            for letter in reversed(hw):
                part = system.mul_gen_terms(letter, part)
            add_into(out, part, hc)
        self._embed_memo[key] = out
        return out

    def embed(self, p: NCPoly) -> NCPoly:
        out: Terms = {}
        kind = None
        for w, c in p.terms.items():
            if w:
                kind = w[0][0]
        system = self.x if kind in (None, "x") else self.d
        for w, c in system.substitute(p.terms).items():
            add_into(out, self.embed_word(w), c)
        return NCPoly._raw(out)

    def embed_x_in_t(self, i: int, j: int) -> NCPoly:
        self.fam.linear_form(i, j, self.fam.gamma_x)
        return NCPoly._raw(self.t.reduce_terms(self.embed_generator("x", i, j)))

    def embed_d_in_del(self, i: int, j: int) -> NCPoly:
        self.fam.linear_form(i, j, self.fam.gamma_d)
        return NCPoly._raw(self.del_.reduce_terms(self.embed_generator("d", i, j)))

    # weights
    def x_weight(self, word: Word) -> Tuple[int, ...]:
        w = [0] * self.fam.N
        for kind, i, j in word:
            s = 1 if kind in ("x", "t") else -1
            w[i - 1] += s
            if kind in ("x", "d"):
                w[j - 1] += s
        return tuple(w)

    def monomials_of_weight(self, kind: str, degree: int, weight: Sequence[int]) -> List[Word]:
        system = self.x if kind == "x" else self.d
        return _monomials_of_weight(self, system, degree, tuple(weight))

    def express_in_x(self, p: NCPoly, degree: int, kind: str = "x") -> NCPoly:
        """The x-polynomial (or d-polynomial) of the given degree whose image is p."""
        base_sys = self.t if kind == "x" else self.del_
        target = base_sys.normal_form(p).terms
        if not target:
            return NCPoly()
        if any(len(w) != 2 * degree for w in target):
            raise NotInSubalgebra("not in the image: wrong degree")
        by_weight: Dict[Tuple[int, ...], Terms] = defaultdict(dict)
        for w, c in target.items():
            by_weight[self.x_weight(w)][w] = c
        result: Terms = {}
        for weight, part in sorted(by_weight.items()):
            # t-weight counts one row index per letter; x-words count two
            cands = self.monomials_of_weight(kind, degree, weight)
            images = [self.embed_word(m) for m in cands]
            rows = sorted(set(part) | {w for im in images for w in im})
            matrix = [[im.get(r, ZERO) for im in images] for r in rows]
            sol = solve(matrix, [part.get(r, ZERO) for r in rows]) if cands else None
            if sol is None:
                raise NotInSubalgebra(f"not in the image of the {kind}-embedding")
            for m, c in zip(cands, sol):
                if c:
                    result[m] = c
        return NCPoly._raw(result)

    # PD acting on P
    def project_gen(self, g: Gen, word: Word) -> Terms:
        """g . (normal-form x-word) with every term containing a d dropped."""
        if g[0] == "x":
            return self.x.mul_gen(g, word)
        if not word:
            return {}
        key = (g, word)
        hit = self._proj_memo.get(key)
        if hit is not None:
            return hit
        rule = self.xd.rules[(g, word[0])]
        rest = word[1:]
        out: Terms = {}
        for rw, rc in rule.items():
            if not rw:
                add_into(out, {rest: rc})
            elif len(rw) == 2 and rw[0][0] == "x" and rw[1][0] == "d":
                inner = self.project_gen(rw[1], rest)
                add_into(out, self.x.mul_gen_terms(rw[0], inner), rc)
            else:
                raise RewriteError(f"unexpected cross-rule term {rw}")
        self._proj_memo[key] = out
        return out

    def act_word(self, word: Word, p: Mapping[Word, RatFunc]) -> Terms:
        out = dict(p)
        for g in reversed(word):
            nxt: Terms = {}
            for w, c in out.items():
                add_into(nxt, self.project_gen(g, w), c)
            out = nxt
            if not out:
                break
        return out

    def act_pd_on_p(self, a: NCPoly, p: NCPoly) -> NCPoly:
        ptarget = self.x.normal_form(p).terms
        aterms = self.xd.substitute(a.terms)
        out: Terms = {}
        cache: Dict[Word, Terms] = {}
        for w, c in aterms.items():
            split = next((k for k, g in enumerate(w) if g[0] == "d"), len(w))
            xs, ds = w[:split], w[split:]
            if any(g[0] == "x" for g in ds):
                add_into(out, self.act_word(w, ptarget), c)
                continue
            if ds not in cache:
                cache[ds] = self.act_word(ds, ptarget)
            part = cache[ds]
            for g in reversed(xs):
                part = self.x.mul_gen_terms(g, part)
            add_into(out, part, c)
        return NCPoly._raw(out)

    def pairing(self, dpoly: NCPoly, p: NCPoly) -> RatFunc:
        return self.act_pd_on_p(dpoly, p).constant_term()

    def pd_mul(self, a: NCPoly, b: NCPoly) -> NCPoly:
        return self.xd.mul(a, b)


def _monomials_of_weight(tower, system, degree, weight):
    key = (id(system), degree, weight)
    cache = tower.__dict__.setdefault("_weight_cache", {})
    if key not in cache:
        found = defaultdict(list)
        for w in system.ordered_words(degree):
            found[tower.x_weight(w)].append(w)
        for wt, ws in found.items():
            cache[(id(system), degree, wt)] = ws
        cache.setdefault(key, [])
    return cache[key]


_TOWERS: Dict[Tuple[Kind, int], AlgebraTower] = {}


def build_tower(fam: FamilyDescriptor, check_confluence: bool = False) -> AlgebraTower:
    """The (cached) tower for a family; optionally confluence-checked."""
    key = (fam.kind, fam.n)
    tower = _TOWERS.get(key)
    if tower is None:
        tower = AlgebraTower(fam)
        _TOWERS[key] = tower
    if check_confluence:
        bad = {k: v for k, v in tower.confluence_report().items() if v}
        if bad:
            raise RewriteError(f"local confluence fails in {sorted(bad)} for {fam}")
    return tower


def rules_from_embedding(tower: AlgebraTower, kind: str = "x") -> RewriteSystem:
    """Rules for P (or D) obtained from the kernel of the embedding in degree 2.

    This is an independent route to the same algebra: instead of the matrix
    relations, it finds every linear dependency among images of degree-2
    words.
    """
    fam = tower.fam
    gens = canonical_generators(fam, kind)
    words = [(g, h) for g in gens for h in gens]
    by_weight = defaultdict(list)
    for w in words:
        by_weight[tower.x_weight(w)].append(w)
    relations: List[Terms] = []
    from .linalg import nullspace
    for weight, ws in sorted(by_weight.items()):
        images = [tower.embed_word(w) for w in ws]
        rows = sorted({r for im in images for r in im})
        matrix = [[im.get(r, ZERO) for im in images] for r in rows]
        for vec in nullspace(matrix, len(ws)):
            relations.append({w: c for w, c in zip(ws, vec) if c})
    return derive_rewrite_rules(relations, gens, name=f"{kind} via embedding for {fam}")


def cross_rule_shape(tower: AlgebraTower, a: int, b: int, e: int, f: int):
    """Split the rule for d[a,b] x[e,f] into (leading coefficient, tail, constant).

    The leading coefficient is that of x[e,f] d[a,b]; the tail holds every
    other quadratic term.
    """
    rule = tower.xd.rules.get((("d", a, b), ("x", e, f)))
    if rule is None:
        raise KeyError(f"no rule for d[{a},{b}] x[{e},{f}]")
    lead_word = (("x", e, f), ("d", a, b))
    lead = rule.get(lead_word, ZERO)
    constant = rule.get((), ZERO)
    tail = {w: c for w, c in rule.items() if w and w != lead_word}
    return lead, tail, constant


def triangularity_violations(tower: AlgebraTower) -> List[Tuple]:
    """Cross rules whose quadratic part is not q^s x[e,f] d[a,b] plus strictly higher terms.

    s = delta_af + delta_ae + delta_bf + delta_be, and a term x[e',f'] d[a',b']
    is higher when e'>=e, f'>=f, a'>=a, b'>=b with one inequality strict.
    """
    bad = []
    for a, b in tower.fam.canonical:
        for e, f in tower.fam.canonical:
            lead, tail, _ = cross_rule_shape(tower, a, b, e, f)
            s = (a == f) + (a == e) + (b == f) + (b == e)
            if lead != qpow(s):
                bad.append(((a, b, e, f), "leading exponent", lead))
            for w in tail:
                (_, e2, f2), (_, a2, b2) = w
                if not (e2 >= e and f2 >= f and a2 >= a and b2 >= b):
                    bad.append(((a, b, e, f), "term not higher", w))
    return bad

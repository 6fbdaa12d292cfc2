"""Noncommutative polynomials and PBW rewriting from degree-2 relations."""

from __future__ import annotations

import re
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .linalg import Echelon
from .scalar import ONE, ZERO, RatFunc, parse_ratfunc

GEN_KINDS = ("t", "del", "x", "d")

Gen = Tuple[str, int, int]
Word = Tuple[Gen, ...]
Terms = Dict[Word, RatFunc]


def gen(kind: str, i: int, j: int) -> Gen:
    if kind not in GEN_KINDS:
        raise ValueError(f"unknown generator kind {kind!r}")
    return (kind, i, j)


def gen_str(g: Gen) -> str:
    return f"{g[0]}[{g[1]},{g[2]}]"


def word_str(w: Word) -> str:
    return " ".join(gen_str(g) for g in w)


class RewriteError(RuntimeError):
    """Raised when a rule set cannot be built or reduction does not terminate."""


class IncompletePresentation(RewriteError):
    pass


class NCPoly:
    """A Q(q)-linear combination of words in indexed generators."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Word, RatFunc]] = None):
        self.terms: Terms = {}
        for w, c in (terms or {}).items():
            c = RatFunc.coerce(c)
            if c:
                self.terms[tuple(w)] = c

    @staticmethod
    def _raw(terms: Terms) -> "NCPoly":
        p = NCPoly()
        p.terms = terms
        return p

    @staticmethod
    def constant(c) -> "NCPoly":
        return NCPoly({(): RatFunc.coerce(c)})

    @staticmethod
    def of_word(word: Sequence[Gen], coef=ONE) -> "NCPoly":
        return NCPoly({tuple(word): RatFunc.coerce(coef)})

    @staticmethod
    def generator(kind: str, i: int, j: int) -> "NCPoly":
        return NCPoly({(gen(kind, i, j),): ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        other = _as_poly(other)
        out = dict(self.terms)
        add_into(out, other.terms)
        return NCPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly._raw({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def scale(self, c) -> "NCPoly":
        c = RatFunc.coerce(c)
        if not c:
            return NCPoly()
        return NCPoly._raw({w: v * c for w, v in self.terms.items()})

    def __mul__(self, other):
        """Free (concatenation) product; scalars act by scaling."""
        if isinstance(other, (RatFunc, int)):
            return self.scale(other)
        return NCPoly._raw(free_mul(self.terms, other.terms))

    def __rmul__(self, other):
        if isinstance(other, (RatFunc, int)):
            return self.scale(other)
        return NCPoly._raw(free_mul(_as_poly(other).terms, self.terms))

    def __eq__(self, other):
        if not isinstance(other, NCPoly):
            try:
                other = _as_poly(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def homogeneous_part(self, degree: int) -> "NCPoly":
        return NCPoly._raw({w: c for w, c in self.terms.items() if len(w) == degree})

    def constant_term(self) -> RatFunc:
        return self.terms.get((), ZERO)

    def coefficient(self, word: Sequence[Gen]) -> RatFunc:
        return self.terms.get(tuple(word), ZERO)

    def generators(self) -> set:
        return {g for w in self.terms for g in w}

    def sorted_items(self, rank: Optional[Mapping[Gen, int]] = None):
        if rank is None:
            key = lambda kv: (len(kv[0]), [(GEN_KINDS.index(g[0]), g[1], g[2]) for g in kv[0]])
        else:
            key = lambda kv: (len(kv[0]), [rank[g] for g in kv[0]])
        return sorted(self.terms.items(), key=key)

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for w, c in self.sorted_items():
            coef = str(c)
            if " " in coef or "/" in coef:
                coef = f"({coef})"
            pieces.append(f"{coef} * {word_str(w)}" if w else coef)
        return " + ".join(pieces)

    __repr__ = __str__


def _as_poly(value) -> NCPoly:
    if isinstance(value, NCPoly):
        return value
    if isinstance(value, (RatFunc, int)):
        return NCPoly.constant(value)
    raise TypeError(f"cannot treat {type(value).__name__} as an NCPoly")


def add_into(target: Terms, source: Mapping[Word, RatFunc], coef: RatFunc = ONE) -> None:
    for w, c in source.items():
        v = target.get(w, ZERO) + (c * coef if coef is not ONE else c)
        if v:
            target[w] = v
        else:
            target.pop(w, None)


def free_mul(a: Mapping[Word, RatFunc], b: Mapping[Word, RatFunc]) -> Terms:
    out: Terms = {}
    for w1, c1 in a.items():
        for w2, c2 in b.items():
            w = w1 + w2
            v = out.get(w, ZERO) + c1 * c2
            if v:
                out[w] = v
            else:
                out.pop(w, None)
    return out


_GEN_RE = re.compile(r"(del|t|x|d)\[\s*(\d+)\s*,\s*(\d+)\s*\]")


def parse_ncpoly(text: str) -> NCPoly:
    """Parse the printed form, e.g. "(q^2 - 1) * x[1,2] d[1,2] + 1"."""
    result: Terms = {}
    for chunk in _split_terms(text):
        chunk = chunk.strip()
        if not chunk:
            continue
        sign = ONE
        while chunk.startswith("-"):
            sign, chunk = -sign, chunk[1:].strip()
        gens = list(_GEN_RE.finditer(chunk))
        if gens:
            head = chunk[: gens[0].start()].strip()
            tail = chunk[gens[-1].end():].strip()
            if tail:
                raise ValueError(f"trailing text in term {chunk!r}")
            head = head[:-1].strip() if head.endswith("*") else head
            coef = parse_ratfunc(head) if head else ONE
            word = tuple(gen(m.group(1), int(m.group(2)), int(m.group(3))) for m in gens)
            between = _GEN_RE.sub("", chunk[gens[0].start():]).strip()
            if between.replace("*", "").strip():
                raise ValueError(f"unexpected text in term {chunk!r}")
        else:
            coef, word = parse_ratfunc(chunk), ()
        add_into(result, {word: coef * sign})
    return NCPoly._raw(result)


def _split_terms(text: str) -> List[str]:
    """Split on top-level + and binary - signs."""
    parts, depth, cur, prev = [], 0, [], ""
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if depth == 0 and ch in "+-" and prev not in ("", "(", "^", "*", "e", "/") and "".join(cur).strip():
            parts.append("".join(cur))
            cur = ["-"] if ch == "-" else []
        else:
            cur.append(ch)
        if not ch.isspace():
            prev = ch
    parts.append("".join(cur))
    return parts


class RewriteSystem:
    """Ordered generators, linear substitutions and degree-2 rewrite rules.

    A word is in normal form when its letters are weakly increasing in the
    generator order.  Each rule rewrites an out-of-order pair g h (g after h)
    as a combination of normal-form words of degree at most two.
    """

    def __init__(self, order: Sequence[Gen], rules: Mapping[Tuple[Gen, Gen], Terms],
                 substitutions: Optional[Mapping[Gen, Terms]] = None, step_budget: int = 10 ** 6,
                 name: str = ""):
        self.order: Tuple[Gen, ...] = tuple(order)
        self.rank: Dict[Gen, int] = {g: i for i, g in enumerate(self.order)}
        if len(self.rank) != len(self.order):
            raise ValueError("duplicate generator in order")
        self.rules: Dict[Tuple[Gen, Gen], Terms] = {k: dict(v) for k, v in rules.items()}
        self.substitutions: Dict[Gen, Terms] = {k: dict(v) for k, v in (substitutions or {}).items()}
        self.step_budget = step_budget
        self.name = name
        self._memo: Dict[Tuple[Gen, Word], Terms] = {}
        self._steps = 0

    def is_ordered(self, word: Word) -> bool:
        r = self.rank
        return all(r[a] <= r[b] for a, b in zip(word, word[1:]))

    def ordered_words(self, degree: int) -> List[Word]:
        out: List[Word] = []

        def rec(prefix, start):
            if len(prefix) == degree:
                out.append(tuple(prefix))
                return
            for k in range(start, len(self.order)):
                prefix.append(self.order[k])
                rec(prefix, k)
                prefix.pop()

        rec([], 0)
        return out

    def irreducible_words(self, degree: int) -> List[Word]:
        """Words of the given degree containing no rule left-hand side."""
        out: List[Word] = []

        def rec(prefix):
            if len(prefix) == degree:
                out.append(tuple(prefix))
                return
            for g in self.order:
                if prefix and (prefix[-1], g) in self.rules:
                    continue
                prefix.append(g)
                rec(prefix)
                prefix.pop()

        rec([])
        return out

    # substitution of non-canonical generators
    def substitute(self, terms: Mapping[Word, RatFunc]) -> Terms:
        if not self.substitutions:
            return dict(terms)
        out: Terms = {}
        for w, c in terms.items():
            expanded: Terms = {(): c}
            for g in w:
                if g in self.substitutions:
                    expanded = free_mul(expanded, self.substitutions[g])
                elif g in self.rank:
                    expanded = {ew + (g,): ec for ew, ec in expanded.items()}
                else:
                    raise RewriteError(f"generator {gen_str(g)} is not part of {self.name or 'this system'}")
                if not expanded:
                    break
            add_into(out, expanded)
        return out

    # reduction
    def mul_gen(self, g: Gen, word: Word) -> Terms:
        """Normal form of g times a normal-form word."""
        key = (g, word)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        self._steps += 1
        if self._steps > self.step_budget:
            raise RewriteError(f"reduction step budget {self.step_budget} exceeded in {self.name or 'rewrite system'}")
        if not word or self.rank[g] <= self.rank[word[0]]:
            result = {(g,) + word: ONE}
        else:
            rule = self.rules.get((g, word[0]))
            if rule is None:
                raise IncompletePresentation(f"no rule for {gen_str(g)} {gen_str(word[0])}")
            rest = word[1:]
            result = {}
            for rw, rc in rule.items():
                part: Terms = {rest: ONE}
                for letter in reversed(rw):
                    part = self.mul_gen_terms(letter, part)
                add_into(result, part, rc)
        self._memo[key] = result
        return result

    def mul_gen_terms(self, g: Gen, terms: Mapping[Word, RatFunc]) -> Terms:
        out: Terms = {}
        for w, c in terms.items():
            add_into(out, self.mul_gen(g, w), c)
        return out

    def reduce_terms(self, terms: Mapping[Word, RatFunc]) -> Terms:
        """Normal form of a combination of words over the ordered generators."""
        out: Terms = {}
        for w, c in terms.items():
            if self.is_ordered(w):
                add_into(out, {w: c})
                continue
            part: Terms = {(): ONE}
            for letter in reversed(w):
                part = self.mul_gen_terms(letter, part)
            add_into(out, part, c)
        return out

    def normal_form(self, p) -> NCPoly:
        terms = p.terms if isinstance(p, NCPoly) else p
        self._steps = 0
        return NCPoly._raw(self.reduce_terms(self.substitute(terms)))

    def mul(self, a, b) -> NCPoly:
        """Normal form of a product of two elements."""
        a = a if isinstance(a, NCPoly) else _as_poly(a)
        b = b if isinstance(b, NCPoly) else _as_poly(b)
        self._steps = 0
        a_terms = self.substitute(a.terms)
        b_terms = self.reduce_terms(self.substitute(b.terms))
        out: Terms = {}
        for w, c in a_terms.items():
            part = dict(b_terms)
            for letter in reversed(w):
                part = self.mul_gen_terms(letter, part)
            add_into(out, part, c)
        return NCPoly._raw(out)

    def rule_items(self):
        return sorted(self.rules.items(), key=lambda kv: (self.rank[kv[0][0]], self.rank[kv[0][1]]))


def nc_mul(p: NCPoly, q: NCPoly, rs: RewriteSystem) -> NCPoly:
    return rs.mul(p, q)


def normal_form(p: NCPoly, rs: RewriteSystem) -> NCPoly:
    return rs.normal_form(p)


def derive_rewrite_rules(relations: Iterable, order: Sequence[Gen],
                         substitutions: Optional[Mapping[Gen, Terms]] = None,
                         extra_rules: Optional[Mapping[Tuple[Gen, Gen], Terms]] = None,
                         pairs: Optional[Iterable[Tuple[Gen, Gen]]] = None,
                         name: str = "", step_budget: int = 10 ** 6) -> RewriteSystem:
    """Solve the span of the given relations for every out-of-order pair.

    Relations are NCPolys (or term maps) that vanish in the algebra; they are
    first rewritten through ``substitutions``.  Out-of-order degree-2 words
    are preferred as pivots, so each reduced row reads ``g h = ...`` with
    the remaining words ordered.  ``pairs`` restricts which out-of-order pairs
    must be solved (defaults to all of them); ``extra_rules`` are merged in
    unchanged.
    """
    shell = RewriteSystem(order, {}, substitutions, name=name)
    rank = shell.rank

    def column_key(w: Word):
        if len(w) == 2 and rank[w[0]] > rank[w[1]]:
            return (2, len(w), tuple(rank[g] for g in w))
        return (1 if len(w) == 2 else 0, len(w), tuple(rank[g] for g in w))

    ech = Echelon(order=column_key)
    for rel in relations:
        terms = rel.terms if isinstance(rel, NCPoly) else rel
        sub = shell.substitute(terms)
        if any(len(w) > 2 for w in sub):
            raise RewriteError("relations must have degree at most two")
        if sub:
            ech.add(sub)
    rows = ech.reduced_rows()
    rules: Dict[Tuple[Gen, Gen], Terms] = {}
    for pivot, row in rows.items():
        if not (len(pivot) == 2 and rank[pivot[0]] > rank[pivot[1]]):
            raise RewriteError(
                f"relations force a dependency among ordered words (pivot {word_str(pivot) or '1'}); "
                "the relation set is inconsistent with a PBW basis")
        rules[(pivot[0], pivot[1])] = {w: -c for w, c in row.items() if w != pivot}
    for key, rhs in (extra_rules or {}).items():
        if key in rules:
            raise RewriteError(f"duplicate rule for {gen_str(key[0])} {gen_str(key[1])}")
        rules[key] = dict(rhs)
    needed = pairs if pairs is not None else [(g, h) for g, h in product(order, repeat=2) if rank[g] > rank[h]]
    missing = [(g, h) for g, h in needed if (g, h) not in rules]
    if missing:
        listed = ", ".join(f"{gen_str(g)} {gen_str(h)}" for g, h in missing[:8])
        raise IncompletePresentation(f"incomplete presentation: no rule for {listed}")
    return RewriteSystem(order, rules, substitutions, name=name, step_budget=step_budget)


def check_local_confluence(rs: RewriteSystem, up_to_degree: int = 3,
                           generators: Optional[Sequence[Gen]] = None) -> List[Tuple[Word, NCPoly, NCPoly]]:
    """Words whose reductions through different first rules disagree.

    Only words with at least two reducible positions can disagree, so those
    are the ones enumerated.
    """
    if up_to_degree < 3:
        raise ValueError("confluence is checked from degree 3 upwards")
    gens = list(generators) if generators is not None else list(rs.order)
    violations = []
    for degree in range(3, up_to_degree + 1):
        for word in product(gens, repeat=degree):
            positions = [p for p in range(degree - 1) if (word[p], word[p + 1]) in rs.rules]
            if len(positions) < 2:
                continue
            results = []
            for p in positions:
                rhs = rs.rules[(word[p], word[p + 1])]
                expanded = {word[:p] + rw + word[p + 2:]: c for rw, c in rhs.items()}
                rs._steps = 0
                results.append(NCPoly._raw(rs.reduce_terms(expanded)))
            if any(r != results[0] for r in results[1:]):
                violations.append((word, results[0], next(r for r in results[1:] if r != results[0])))
    return violations

"""Exact scalars in Q(q) and commutative polynomials over Q(q)."""

from __future__ import annotations

import ast
from fractions import Fraction
from itertools import permutations
from typing import Dict, Iterable, Iterator, Sequence, Tuple

from flint import fmpz_poly

_ONE = fmpz_poly([1])
_SCALARS = (int, Fraction, fmpz_poly)
_ZERO = fmpz_poly([])


class RatFunc:
    """A reduced quotient num/den of integer polynomials in q.

    The denominator always has positive leading coefficient and is coprime
    to the numerator, so equal values have equal representations.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=0, den=None, _reduced=False):
        if isinstance(num, RatFunc):
            if den is not None:
                raise TypeError("cannot combine a RatFunc with a denominator")
            self.num, self.den, self._hash = num.num, num.den, num._hash
            return
        if isinstance(num, Fraction):
            num, den = fmpz_poly([num.numerator]), fmpz_poly([num.denominator]) * (den or 1)
        n = num if isinstance(num, fmpz_poly) else fmpz_poly(num if isinstance(num, list) else [num])
        d = _ONE if den is None else (den if isinstance(den, fmpz_poly) else fmpz_poly(den if isinstance(den, list) else [den]))
        if d.is_zero():
            raise ZeroDivisionError("zero denominator")
        self._hash = None
        if _reduced:
            self.num, self.den = n, d
            return
        if n.is_zero():
            self.num, self.den = _ZERO, _ONE
            return
        if not d.is_one():
            g = n.gcd(d)
            if not g.is_one():
                n, d = n // g, d // g
            if d.leading_coefficient() < 0:
                n, d = -n, -d
        self.num, self.den = n, d

    # constructors
    @staticmethod
    def q_power(k: int) -> "RatFunc":
        if k >= 0:
            return RatFunc(fmpz_poly([0] * k + [1]), _reduced=True)
        return RatFunc(_ONE, fmpz_poly([0] * (-k) + [1]), _reduced=True)

    @staticmethod
    def coerce(value) -> "RatFunc":
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, str):
            return parse_ratfunc(value)
        return RatFunc(value)

    # predicates
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, RatFunc):
            if not isinstance(other, _SCALARS):
                return NotImplemented
            other = RatFunc(other)
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        if not isinstance(other, RatFunc):
            if not isinstance(other, _SCALARS):
                return NotImplemented
            other = RatFunc(other)
        return self + (-other)

    def __rsub__(self, other):
        return RatFunc(other) - self

    def __mul__(self, other):
        if not isinstance(other, RatFunc):
            if not isinstance(other, _SCALARS):
                return NotImplemented
            other = RatFunc(other)
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        if self.den.is_one() and other.den.is_one():
            return RatFunc(self.num * other.num, _ONE, _reduced=True)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n, d = self.den, self.num
        if d.leading_coefficient() < 0:
            n, d = -n, -d
        return RatFunc(n, d, _reduced=True)

    def __truediv__(self, other):
        if not isinstance(other, RatFunc):
            if not isinstance(other, _SCALARS):
                return NotImplemented
            other = RatFunc(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RatFunc(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num ** k, self.den ** k, _reduced=True)

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            if not isinstance(other, _SCALARS):
                return NotImplemented
            other = RatFunc(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(int(c) for c in self.num.coeffs()), tuple(int(c) for c in self.den.coeffs())))
        return self._hash

    # evaluation
    def subs(self, value: "RatFunc") -> "RatFunc":
        """Substitute q -> value, where value is itself in Q(q)."""
        value = RatFunc.coerce(value)
        return _poly_at(self.num, value) / _poly_at(self.den, value)

    def at(self, value) -> Fraction:
        """Evaluate at a rational number."""
        value = Fraction(value)
        num = sum((Fraction(int(c)) * value ** i for i, c in enumerate(self.num.coeffs())), Fraction(0))
        den = sum((Fraction(int(c)) * value ** i for i, c in enumerate(self.den.coeffs())), Fraction(0))
        return num / den

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        num = _format_poly(self.num)
        if self.den.is_one():
            return num
        den = _format_poly(self.den)
        if _needs_parens(self.num):
            num = f"({num})"
        if _needs_parens(self.den):
            den = f"({den})"
        return f"{num}/{den}"


def _poly_at(p: fmpz_poly, value: RatFunc) -> RatFunc:
    acc = ZERO
    for c in reversed(p.coeffs()):
        acc = acc * value + int(c)
    return acc


def _needs_parens(p: fmpz_poly) -> bool:
    coeffs = [int(c) for c in p.coeffs()]
    nonzero = [(d, c) for d, c in enumerate(coeffs) if c != 0]
    if len(nonzero) > 1:
        return True
    if not nonzero:
        return False
    deg, c = nonzero[0]
    return c < 0 or (deg > 0 and abs(c) != 1)


def _format_poly(p: fmpz_poly) -> str:
    coeffs = [int(c) for c in p.coeffs()]
    if not any(coeffs):
        return "0"
    pieces = []
    for deg in range(len(coeffs) - 1, -1, -1):
        c = coeffs[deg]
        if c == 0:
            continue
        mag = abs(c)
        if deg == 0:
            body = str(mag)
        else:
            var = "q" if deg == 1 else f"q^{deg}"
            body = var if mag == 1 else f"{mag}*{var}"
        if not pieces:
            pieces.append(body if c > 0 else f"-{body}")
        else:
            pieces.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(pieces)


ZERO = RatFunc(0)
ONE = RatFunc(1)
Q = RatFunc.q_power(1)
QINV = RatFunc.q_power(-1)


def qpow(k: int) -> RatFunc:
    return RatFunc.q_power(k)


def q_integer(k: int) -> RatFunc:
    """The symmetric quantum integer (q^k - q^-k)/(q - q^-1)."""
    return (qpow(k) - qpow(-k)) / (Q - QINV)


class ParseError(ValueError):
    pass


def parse_ratfunc(text: str) -> RatFunc:
    """Parse expressions such as "(q^4 - 1)/(q^2 - 1)" or "-q**-1"."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse scalar {text!r}") from exc
    return _eval_node(tree.body, text)


def _eval_node(node, text):
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return RatFunc(node.value)
    if isinstance(node, ast.Name) and node.id == "q":
        return Q
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _eval_node(node.operand, text)
        return -inner if isinstance(node.op, ast.USub) else inner
    if isinstance(node, ast.BinOp):
        left = _eval_node(node.left, text)
        if isinstance(node.op, ast.Pow):
            exponent = _int_exponent(node.right, text)
            return left ** exponent
        right = _eval_node(node.right, text)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if right.is_zero():
                raise ParseError(f"division by zero in {text!r}")
            return left / right
    raise ParseError(f"unsupported syntax in scalar {text!r}")


def _int_exponent(node, text) -> int:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_int_exponent(node.operand, text)
    raise ParseError(f"exponent must be an integer in {text!r}")


Monomial = Tuple[int, ...]


class SymPoly:
    """A commutative polynomial in n variables with coefficients in Q(q)."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Dict[Monomial, RatFunc] | None = None):
        self.nvars = nvars
        self.terms: Dict[Monomial, RatFunc] = {}
        for mono, coef in (terms or {}).items():
            if len(mono) != nvars:
                raise ValueError("monomial arity mismatch")
            coef = RatFunc.coerce(coef)
            if coef:
                self.terms[tuple(mono)] = coef

    @staticmethod
    def monomial(exps: Sequence[int], coef=ONE) -> "SymPoly":
        return SymPoly(len(exps), {tuple(exps): RatFunc.coerce(coef)})

    @staticmethod
    def monomial_symmetric(partition: Sequence[int], nvars: int) -> "SymPoly":
        """The monomial symmetric polynomial m_partition in nvars variables."""
        parts = tuple(partition) + (0,) * (nvars - len(partition))
        if len(parts) > nvars:
            raise ValueError("partition has more parts than variables")
        return SymPoly(nvars, {perm: ONE for perm in set(permutations(parts))})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "SymPoly") -> "SymPoly":
        out = dict(self.terms)
        for mono, coef in other.terms.items():
            out[mono] = out.get(mono, ZERO) + coef
        return SymPoly(self.nvars, out)

    def __neg__(self):
        return SymPoly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, coef) -> "SymPoly":
        coef = RatFunc.coerce(coef)
        return SymPoly(self.nvars, {m: c * coef for m, c in self.terms.items()})

    def __mul__(self, other: "SymPoly") -> "SymPoly":
        out: Dict[Monomial, RatFunc] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, ZERO) + c1 * c2
        return SymPoly(self.nvars, out)

    def __eq__(self, other):
        return isinstance(other, SymPoly) and self.nvars == other.nvars and self.terms == other.terms

    def evaluate(self, point: Sequence) -> RatFunc:
        point = [RatFunc.coerce(p) for p in point]
        total = ZERO
        for mono, coef in self.terms.items():
            term = coef
            for value, e in zip(point, mono):
                if e:
                    term = term * value ** e
            total = total + term
        return total

    def eval_at_q_powers(self, exponents: Sequence[int]) -> RatFunc:
        """Evaluate at x_i = q^exponents[i]."""
        return self.evaluate([qpow(e) for e in exponents])

    def rescale_variables(self, factors: Sequence) -> "SymPoly":
        """Substitute x_i -> factors[i] * x_i."""
        factors = [RatFunc.coerce(f) for f in factors]
        out = {}
        for mono, coef in self.terms.items():
            c = coef
            for f, e in zip(factors, mono):
                if e:
                    c = c * f ** e
            out[mono] = c
        return SymPoly(self.nvars, out)

    def is_symmetric(self) -> bool:
        for mono, coef in self.terms.items():
            for perm in set(permutations(mono)):
                if self.terms.get(perm) != coef:
                    return False
        return True

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def items(self) -> Iterator[Tuple[Monomial, RatFunc]]:
        return iter(sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0]))))

    def __str__(self):
        return self.to_string()

    def to_string(self, var: str = "x") -> str:
        if not self.terms:
            return "0"
        pieces = []
        for mono, coef in self.items():
            vars_ = " ".join(f"{var}{i + 1}" if e == 1 else f"{var}{i + 1}^{e}" for i, e in enumerate(mono) if e)
            pieces.append(f"({coef})*{vars_}" if vars_ else f"({coef})")
        return " + ".join(pieces)

    __repr__ = __str__


def sum_ratfuncs(values: Iterable[RatFunc]) -> RatFunc:
    total = ZERO
    for v in values:
        total = total + v
    return total

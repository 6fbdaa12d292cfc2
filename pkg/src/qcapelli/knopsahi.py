"""Interpolation polynomials defined by vanishing conditions, and the comparison
with Capelli eigenvalues."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

from .family import FamilyDescriptor, Partition, make_partition, partitions_up_to
from .linalg import nullspace
from .scalar import ONE, ZERO, RatFunc, SymPoly


class InterpolationError(RuntimeError):
    pass


def monomial_symmetric(nu: Sequence[int], n: int) -> SymPoly:
    nu = make_partition(nu, n)
    return SymPoly.monomial_symmetric(nu, n)


def point(mu: Partition, n: int, a: RatFunc) -> List[RatFunc]:
    """a^mu read componentwise: (a^mu_1, ..., a^mu_n)."""
    parts = list(mu) + [0] * (n - len(mu))
    return [a ** p for p in parts]


@dataclass
class InterpolationPoly:
    partition: Partition
    n: int
    a: RatFunc
    g: RatFunc
    in_y: SymPoly        # symmetric polynomial in y_i = x_i g^-i
    in_x: SymPoly        # the same polynomial written in x
    value_at_lambda: RatFunc
    normalized: bool
    basis_size: int
    conditions: int
    kernel_dim: int

    def evaluate(self, x: Sequence[RatFunc]) -> RatFunc:
        return self.in_x.evaluate(x)

    def eval_at_q_powers(self, exponents: Sequence[int]) -> RatFunc:
        return self.in_x.eval_at_q_powers(exponents)


def knop_sahi(lam: Sequence[int], n: int, a, g, normalized: bool = True) -> InterpolationPoly:
    """The polynomial of degree |lam|, symmetric in y, vanishing at a^mu for mu != lam, |mu| <= |lam|."""
    lam = make_partition(lam, n)
    a, g = RatFunc.coerce(a), RatFunc.coerce(g)
    if not a or not g:
        raise ValueError("a and g must be nonzero")
    size = sum(lam)
    basis = partitions_up_to(size, n)
    monos = [monomial_symmetric(nu, n) for nu in basis]
    shifts = [g ** (-(i + 1)) for i in range(n)]

    def y_point(mu):
        return [x * s for x, s in zip(point(mu, n, a), shifts)]

    conditions = [mu for mu in basis if mu != lam]
    matrix = [[m.evaluate(y_point(mu)) for m in monos] for mu in conditions]
    kernel = nullspace(matrix, len(basis)) if conditions else [[ONE]]
    if len(kernel) != 1:
        raise InterpolationError(f"interpolation system degenerate: kernel dimension {len(kernel)}")
    in_y = SymPoly(n)
    for c, m in zip(kernel[0], monos):
        if c:
            in_y = in_y + m.scale(c)
    value = in_y.evaluate(y_point(lam))
    if not value:
        raise InterpolationError("nondegeneracy violated: the polynomial vanishes at a^lambda")
    if normalized:
        in_y = in_y.scale(value.inverse())
    in_x = in_y.rescale_variables(shifts)
    return InterpolationPoly(lam, n, a, g, in_y, in_x, value if not normalized else ONE,
                             normalized, len(basis), len(conditions), len(kernel))


def family_parameters(fam: FamilyDescriptor):
    """(a, g, m) attached to the family."""
    return fam.a, fam.g, fam.m


@dataclass
class InterpolationCell:
    lam: Partition
    mu: Partition
    eigenvalue: Optional[RatFunc]
    interpolation: RatFunc
    ok: bool
    error: Optional[str] = None


def verify_theorem_b(fam: FamilyDescriptor, max_lambda: int, max_mu: int) -> List[InterpolationCell]:
    """Compare every Capelli eigenvalue with the normalized interpolation polynomial at q^{m mu}."""
    from .capelli import CapelliError, capelli_eigenvalue
    a, g, m = family_parameters(fam)
    cells = []
    for lam in partitions_up_to(max_lambda, fam.n):
        ks = knop_sahi(lam, fam.n, a, g, normalized=True)
        for mu in partitions_up_to(max_mu, fam.n):
            parts = list(mu) + [0] * (fam.n - len(mu))
            rhs = ks.eval_at_q_powers([m * p for p in parts])
            try:
                lhs = capelli_eigenvalue(fam, lam, mu)
                cells.append(InterpolationCell(lam, mu, lhs, rhs, lhs == rhs))
            except CapelliError as exc:
                cells.append(InterpolationCell(lam, mu, None, rhs, False, str(exc)))
    return cells

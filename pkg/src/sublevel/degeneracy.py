"""Exact degeneracy decision and the difference-operator pre-check.

A phase ``P`` is degenerate relative to ``{l_j}`` when ``P = sum_j p_j o l_j``.
Only polynomial ``p_j`` with ``deg p_j <= deg P`` need to be searched, so the
question is whether the coefficient vector of ``P`` lies in the span of the
pullbacks ``q o l_j`` of all monomials ``q`` of that degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import islice, product
from typing import Optional

from .exactpoly import (
    DifferenceOperator,
    DimensionError,
    Exponent,
    Polynomial,
    apply_operator,
    compose_linear,
    monomials_up_to,
)
from .linalg import Echelon, inverse
from .linmaps import MapSystem, kernel_basis

#: Upper bound on kernel-vector combinations tried by :func:`annihilator_test`.
ANNIHILATOR_CAP = 512


@dataclass(frozen=True)
class NondegenerateCertificate:
    """Why no decomposition exists.

    ``residual`` is ``P`` reduced against the span of all admissible pullbacks;
    it is nonzero and its leading monomial ``monomial`` is not the leading
    monomial of any element of that span.
    """

    monomial: Exponent
    residual: Polynomial
    span_rank: int
    monomial_count: int

    @property
    def rank_deficit(self) -> int:
        return self.monomial_count - self.span_rank


@dataclass(frozen=True)
class DegeneracyVerdict:
    decomposition: Optional[tuple[Polynomial, ...]] = None
    certificate: Optional[NondegenerateCertificate] = None

    def __post_init__(self):
        if (self.decomposition is None) == (self.certificate is None):
            raise ValueError("exactly one of decomposition / certificate must be set")

    @property
    def degenerate(self) -> bool:
        return self.decomposition is not None

    @property
    def label(self) -> str:
        return "degenerate" if self.degenerate else "nondegenerate"


@dataclass(frozen=True)
class AnnihilatorWitness:
    operator: DifferenceOperator
    image: Polynomial


def _check_inputs(P: Polynomial, s: MapSystem) -> None:
    if P.dimension != s.domain_dim:
        raise DimensionError(
            f"phase has dimension {P.dimension}, maps have domain dimension {s.domain_dim}"
        )
    s.require_surjective()


def recompose(decomposition, s: MapSystem) -> Polynomial:
    """``sum_j p_j o l_j``."""
    total = Polynomial.zero(s.domain_dim)
    for p, m in zip(decomposition, s.maps):
        total = total + compose_linear(p, m.matrix)
    return total


def decide_degeneracy(P: Polynomial, s: MapSystem) -> DegeneracyVerdict:
    _check_inputs(P, s)
    d = s.domain_dim
    zeros = [Polynomial.zero(m.codomain_dim) for m in s.maps]

    if P.is_zero() and s.maps:
        return DegeneracyVerdict(decomposition=tuple(zeros))

    invertible = s.invertible_maps
    if invertible:
        j = invertible[0]
        parts = list(zeros)
        parts[j] = compose_linear(P, inverse(s.maps[j].matrix))
        return DegeneracyVerdict(decomposition=tuple(parts))

    degree = 0 if P.is_zero() else P.degree
    basis = monomials_up_to(d, degree)
    column = {e: i for i, e in enumerate(basis)}

    ech = Echelon(track=True)
    owners: list[tuple[int, Exponent]] = []
    for j, m in enumerate(s.maps):
        for q in monomials_up_to(m.codomain_dim, degree):
            pulled = compose_linear(Polynomial(m.codomain_dim, {q: 1}), m.matrix)
            ech.insert({column[e]: c for e, c in pulled.terms.items()})
            owners.append((j, q))

    target = {column[e]: c for e, c in P.terms.items()}
    coeffs = ech.express(target)
    if coeffs is not None:
        parts = [dict() for _ in s.maps]
        for i, c in coeffs.items():
            j, q = owners[i]
            parts[j][q] = c
        decomposition = tuple(
            Polynomial(m.codomain_dim, t) for m, t in zip(s.maps, parts)
        )
        return DegeneracyVerdict(decomposition=decomposition)

    residual = ech.residual(target)
    res_poly = Polynomial(d, {basis[i]: c for i, c in residual.items()})
    return DegeneracyVerdict(
        certificate=NondegenerateCertificate(
            monomial=basis[min(residual)],
            residual=res_poly,
            span_rank=ech.rank,
            monomial_count=len(basis),
        )
    )


def annihilator_test(
    P: Polynomial, s: MapSystem, cap: int = ANNIHILATOR_CAP
) -> Optional[AnnihilatorWitness]:
    """Sufficient test for nondegeneracy.

    ``prod_j D_{u_j}`` with ``u_j`` in ``kernel(l_j)`` kills every ``f_j o l_j``;
    if it does not kill ``P`` then ``P`` is nondegenerate. ``None`` is
    inconclusive, never a proof of degeneracy.
    """
    _check_inputs(P, s)
    if s.invertible_maps:
        raise ValueError(
            f"maps {s.invertible_maps} are invertible; no kernel vectors exist"
        )
    kernels = [kernel_basis(m) for m in s.maps]
    for choice in islice(product(*kernels), cap):
        op = DifferenceOperator((u, 1) for u in choice)
        image = apply_operator(op, P)
        if not image.is_zero():
            return AnnihilatorWitness(operator=op, image=image)
    return None

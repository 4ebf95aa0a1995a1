"""Families of rational linear maps ``l_j: Q^d -> Q^{d_j}``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

from .exactpoly import DimensionError, Scalar, as_rational
from .linalg import Echelon, dense_to_sparse, mat_vec, nullspace, primitive_integer

Matrix = tuple[tuple[Fraction, ...], ...]


class NonSurjectiveMapError(ValueError):
    def __init__(self, index: int, rank: int, codomain_dim: int):
        super().__init__(
            f"map {index} is not surjective: rank {rank} < codomain dimension {codomain_dim}"
        )
        self.index = index


@dataclass(frozen=True)
class LinearMap:
    """A ``d_j x d`` rational matrix. Surjectivity is checked, not enforced."""

    matrix: Matrix

    def __init__(self, matrix: Sequence[Sequence[Scalar]]):
        rows = tuple(tuple(as_rational(v) for v in row) for row in matrix)
        if not rows or not rows[0]:
            raise DimensionError("a linear map needs at least one row and one column")
        if len({len(r) for r in rows}) != 1:
            raise DimensionError("ragged matrix")
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def row(cls, *entries: Scalar) -> "LinearMap":
        return cls([entries])

    @classmethod
    def coordinates(cls, indices: Sequence[int], dimension: int) -> "LinearMap":
        """Projection onto the listed (zero-based) coordinates."""
        return cls([[int(k == i) for k in range(dimension)] for i in indices])

    @property
    def domain_dim(self) -> int:
        return len(self.matrix[0])

    @property
    def codomain_dim(self) -> int:
        return len(self.matrix)

    @property
    def rank(self) -> int:
        ech = Echelon()
        for row in self.matrix:
            ech.insert(dense_to_sparse(row))
        return ech.rank

    @property
    def is_integer(self) -> bool:
        return all(v.denominator == 1 for row in self.matrix for v in row)

    def __call__(self, x: Sequence[Scalar]) -> tuple[Fraction, ...]:
        if len(x) != self.domain_dim:
            raise DimensionError(f"point has length {len(x)}, expected {self.domain_dim}")
        return mat_vec(self.matrix, [as_rational(v) for v in x])

    def scaled(self, k: Scalar) -> "LinearMap":
        k = as_rational(k)
        return LinearMap([[v * k for v in row] for row in self.matrix])


def check_surjective(m: LinearMap) -> bool:
    return m.rank == m.codomain_dim


def kernel_basis(m: LinearMap) -> list[tuple[int, ...]]:
    """Primitive integer vectors spanning the rational nullspace of ``m``.

    One vector per free column of the echelon form; each has content 1 and a
    positive first nonzero entry.
    """
    return [tuple(primitive_integer(v)) for v in nullspace(m.matrix, m.domain_dim)]


@dataclass(frozen=True)
class MapSystem:
    """An ordered family of maps sharing the domain dimension ``domain_dim``.

    ``scales`` records the per-map factor ``m_j`` applied by
    :func:`normalize_integer` (all 1 for an unnormalized system).
    """

    domain_dim: int
    maps: tuple[LinearMap, ...] = ()
    integer_normalized: bool = False
    scales: tuple[int, ...] = field(default=())

    def __post_init__(self):
        maps = tuple(self.maps)
        object.__setattr__(self, "maps", maps)
        for j, m in enumerate(maps):
            if m.domain_dim != self.domain_dim:
                raise DimensionError(
                    f"map {j} has domain dimension {m.domain_dim}, expected {self.domain_dim}"
                )
        if not self.scales:
            object.__setattr__(self, "scales", (1,) * len(maps))
        elif len(self.scales) != len(maps):
            raise ValueError("one scale per map required")
        if self.integer_normalized and not all(m.is_integer for m in maps):
            raise ValueError("integer_normalized system has non-integer entries")

    @classmethod
    def of(cls, *maps: LinearMap) -> "MapSystem":
        if not maps:
            raise ValueError("use MapSystem(domain_dim) for an empty family")
        return cls(maps[0].domain_dim, maps)

    @classmethod
    def from_rows(cls, *rows: Sequence[Scalar]) -> "MapSystem":
        """A system of rank-one maps ``x -> row . x``."""
        return cls.of(*(LinearMap([r]) for r in rows))

    def __len__(self) -> int:
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)

    def __getitem__(self, j: int) -> LinearMap:
        return self.maps[j]

    @property
    def invertible_maps(self) -> list[int]:
        """Indices of maps with ``d_j == d``; any such map makes every phase degenerate."""
        return [j for j, m in enumerate(self.maps) if m.codomain_dim == self.domain_dim]

    def require_surjective(self) -> None:
        for j, m in enumerate(self.maps):
            r = m.rank
            if r != m.codomain_dim:
                raise NonSurjectiveMapError(j, r, m.codomain_dim)

    @property
    def operator_norm_bound(self) -> Fraction:
        """``rho`` with ``|l_j(z)|_inf <= rho |z|_inf`` for all j (max row l1-norm)."""
        return max(
            (sum(abs(v) for v in row) for m in self.maps for row in m.matrix),
            default=Fraction(0),
        )


def normalize_integer(s: MapSystem) -> MapSystem:
    """Scale each map by the lcm of its entry denominators.

    This is conjugation with ``A = I`` and ``A_j = I / m_j``; fibers, kernels and
    therefore degeneracy and witnesses are unchanged. Idempotent.
    """
    maps, scales = [], []
    for m, old in zip(s.maps, s.scales):
        k = reduce(math.lcm, (v.denominator for row in m.matrix for v in row), 1)
        maps.append(m.scaled(k) if k != 1 else m)
        scales.append(old * k)
    return MapSystem(s.domain_dim, tuple(maps), integer_normalized=True, scales=tuple(scales))

"""Exact sparse linear algebra over Q by fraction-free integer elimination.

Vectors are ``dict[int, value]`` keyed by column index; the pivot of a row is
its smallest column with a nonzero entry. Rows are stored as integer vectors
with content 1, so no rational arithmetic happens inside the elimination.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Mapping, Sequence

SparseVec = dict[int, int]


def _to_integer(vec: Mapping[int, Fraction | int]) -> tuple[SparseVec, int]:
    """Scale a rational sparse vector to integers; returns ``(ints, scale)``."""
    scale = reduce(math.lcm, (Fraction(v).denominator for v in vec.values()), 1)
    out = {}
    for k, v in vec.items():
        v = Fraction(v) * scale
        if v:
            out[k] = v.numerator
    return out, scale


def _content(*vecs: SparseVec) -> int:
    g = 0
    for vec in vecs:
        for v in vec.values():
            g = math.gcd(g, v)
            if g == 1:
                return 1
    return g


class Echelon:
    """Incremental row echelon basis with optional provenance tags.

    With ``track=True`` each stored row carries a tag ``t`` with
    ``row == sum(t[i] * scale_i * input_i)``, where ``input_i`` is the ``i``-th
    vector inserted and ``scale_i`` the integer that cleared its denominators.
    """

    def __init__(self, track: bool = False):
        self.track = track
        self.rows: dict[int, tuple[SparseVec, SparseVec]] = {}
        self.scales: list[int] = []

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def reduce(self, vec: SparseVec, tag: SparseVec | None = None) -> tuple[SparseVec, SparseVec]:
        """Eliminate leading entries until the lead is not a pivot (or vec is 0)."""
        vec = dict(vec)
        tag = dict(tag or {})
        while vec:
            lead = min(vec)
            if lead not in self.rows:
                break
            prow, ptag = self.rows[lead]
            a, b = vec[lead], prow[lead]
            g = math.gcd(a, b)
            ma, mb = b // g, a // g
            if ma != 1:
                vec = {k: v * ma for k, v in vec.items()}
                tag = {k: v * ma for k, v in tag.items()}
            for k, v in prow.items():
                nv = vec.get(k, 0) - v * mb
                if nv:
                    vec[k] = nv
                else:
                    vec.pop(k, None)
            if self.track:
                for k, v in ptag.items():
                    nv = tag.get(k, 0) - v * mb
                    if nv:
                        tag[k] = nv
                    else:
                        tag.pop(k, None)
            g = _content(vec, tag)
            if g > 1:
                vec = {k: v // g for k, v in vec.items()}
                tag = {k: v // g for k, v in tag.items()}
        return vec, tag

    def insert(self, vec: Mapping[int, Fraction | int]) -> int | None:
        """Add a vector to the basis; returns its pivot, or None when dependent."""
        ivec, scale = _to_integer(vec)
        index = len(self.scales)
        self.scales.append(scale)
        reduced, tag = self.reduce(ivec, {index: 1} if self.track else None)
        if not reduced:
            return None
        lead = min(reduced)
        if reduced[lead] < 0:
            reduced = {k: -v for k, v in reduced.items()}
            tag = {k: -v for k, v in tag.items()}
        self.rows[lead] = (reduced, tag)
        return lead

    def contains(self, vec: Mapping[int, Fraction | int]) -> bool:
        ivec, _ = _to_integer(vec)
        reduced, _ = self.reduce(ivec)
        return not reduced

    def express(self, vec: Mapping[int, Fraction | int]) -> dict[int, Fraction] | None:
        """Coefficients ``a`` with ``vec == sum(a[i] * input_i)``, or None.

        Inputs that were dependent when inserted get coefficient zero, which
        makes the answer canonical. Requires ``track=True``.
        """
        if not self.track:
            raise ValueError("express() needs a tracking Echelon")
        ivec, scale = _to_integer(vec)
        own = -1
        reduced, tag = self.reduce(ivec, {own: 1})
        if reduced:
            return None
        kappa = tag.pop(own)
        # kappa * scale * vec + sum(t_i * scale_i * input_i) == 0
        return {
            i: Fraction(-t * self.scales[i], kappa * scale)
            for i, t in tag.items()
            if t
        }

    def residual(self, vec: Mapping[int, Fraction | int]) -> SparseVec:
        ivec, _ = _to_integer(vec)
        return self.reduce(ivec)[0]

    def free_columns(self, ncols: int) -> list[int]:
        return [c for c in range(ncols) if c not in self.rows]

    def null_vector(self, free: int) -> dict[int, Fraction]:
        """The nullspace vector with 1 at ``free`` and 0 at every other free column."""
        if free in self.rows:
            raise ValueError(f"column {free} is a pivot column")
        sol: dict[int, Fraction] = {free: Fraction(1)}
        for p in sorted(self.rows, reverse=True):
            row = self.rows[p][0]
            acc = Fraction(0)
            for k, v in row.items():
                if k != p and k in sol:
                    acc += v * sol[k]
            if acc:
                sol[p] = -acc / row[p]
        return sol


def dense_to_sparse(row: Sequence) -> dict[int, Fraction]:
    return {i: Fraction(v) for i, v in enumerate(row) if v}


def rank(matrix: Sequence[Sequence]) -> int:
    ech = Echelon()
    for row in matrix:
        ech.insert(dense_to_sparse(row))
    return ech.rank


def nullspace(matrix: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Rational basis of ``{x : matrix @ x = 0}``, one vector per free column."""
    ech = Echelon()
    for row in matrix:
        if len(row) != ncols:
            raise ValueError("ragged matrix")
        ech.insert(dense_to_sparse(row))
    basis = []
    for f in ech.free_columns(ncols):
        v = ech.null_vector(f)
        basis.append([v.get(i, Fraction(0)) for i in range(ncols)])
    return basis


def primitive_integer(vec: Sequence[Fraction]) -> list[int]:
    """Clear denominators, divide by content, make the first nonzero entry positive."""
    scale = reduce(math.lcm, (Fraction(v).denominator for v in vec), 1)
    ints = [int(Fraction(v) * scale) for v in vec]
    g = reduce(math.gcd, ints, 0)
    if g == 0:
        return ints
    ints = [v // g for v in ints]
    lead = next(v for v in ints if v)
    return [-v for v in ints] if lead < 0 else ints


def inverse(matrix: Sequence[Sequence]) -> list[list[Fraction]]:
    """Exact inverse by Gauss-Jordan; raises ValueError when singular."""
    n = len(matrix)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def mat_vec(matrix: Sequence[Sequence], vec: Sequence) -> tuple[Fraction, ...]:
    return tuple(sum((Fraction(a) * b for a, b in zip(row, vec)), Fraction(0)) for row in matrix)

"""Exact sparse multivariate polynomials and translation-difference operators.

Coefficients are :class:`fractions.Fraction` values, always stored in lowest
terms, so structural equality of term maps is polynomial equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

Rational = Fraction
Scalar = Union[int, Fraction]
Exponent = tuple[int, ...]

#: Degree of the zero polynomial.
NEG_INF = float("-inf")


class DimensionError(ValueError):
    """Raised when vector, matrix and polynomial dimensions disagree."""


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings to a Fraction.

    Floats are rejected; exact inputs only.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def grlex_key(exponent: Exponent) -> tuple:
    return (sum(exponent), exponent)


def monomials_up_to(dimension: int, degree: int) -> list[Exponent]:
    """All exponents of total degree <= ``degree``, in descending graded-lex order."""
    if degree < 0:
        return []
    out = [e for e in product(range(degree + 1), repeat=dimension) if sum(e) <= degree]
    out.sort(key=grlex_key, reverse=True)
    return out


class Polynomial:
    """Immutable sparse polynomial in ``dimension`` variables over Q."""

    __slots__ = ("_dimension", "_terms", "_hash")

    def __init__(self, dimension: int, terms: Mapping[Exponent, Scalar] | None = None):
        if dimension < 0:
            raise DimensionError("dimension must be nonnegative")
        clean: dict[Exponent, Fraction] = {}
        for exponent, coeff in (terms or {}).items():
            exponent = tuple(int(a) for a in exponent)
            if len(exponent) != dimension or any(a < 0 for a in exponent):
                raise DimensionError(f"bad exponent {exponent} for dimension {dimension}")
            coeff = as_rational(coeff)
            if coeff:
                clean[exponent] = clean.get(exponent, Fraction(0)) + coeff
                if not clean[exponent]:
                    del clean[exponent]
        self._dimension = dimension
        self._terms = clean
        self._hash = None

    # construction helpers

    @classmethod
    def zero(cls, dimension: int) -> "Polynomial":
        return cls(dimension)

    @classmethod
    def constant(cls, value: Scalar, dimension: int) -> "Polynomial":
        return cls(dimension, {(0,) * dimension: value})

    @classmethod
    def variable(cls, index: int, dimension: int) -> "Polynomial":
        """The coordinate function ``x_{index+1}`` (zero-based ``index``)."""
        if not 0 <= index < dimension:
            raise DimensionError(f"variable {index} out of range for dimension {dimension}")
        e = [0] * dimension
        e[index] = 1
        return cls(dimension, {tuple(e): 1})

    @classmethod
    def variables(cls, dimension: int) -> tuple["Polynomial", ...]:
        return tuple(cls.variable(i, dimension) for i in range(dimension))

    @classmethod
    def linear_form(cls, row: Sequence[Scalar]) -> "Polynomial":
        d = len(row)
        terms = {}
        for i, a in enumerate(row):
            e = [0] * d
            e[i] = 1
            terms[tuple(e)] = a
        return cls(d, terms)

    # accessors

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def coefficient(self, exponent: Exponent) -> Fraction:
        return self._terms.get(tuple(exponent), Fraction(0))

    def items(self) -> Iterator[tuple[Exponent, Fraction]]:
        """Terms in descending graded-lex order."""
        for e in sorted(self._terms, key=grlex_key, reverse=True):
            yield e, self._terms[e]

    @property
    def degree(self):
        if not self._terms:
            return NEG_INF
        return max(sum(e) for e in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    def denominator_lcm(self) -> int:
        return reduce(math.lcm, (c.denominator for c in self._terms.values()), 1)

    # arithmetic

    def _check(self, other: "Polynomial") -> None:
        if other._dimension != self._dimension:
            raise DimensionError(
                f"dimension mismatch: {self._dimension} vs {other._dimension}"
            )

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(as_rational(other), self._dimension)

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(self._dimension, terms)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self._dimension, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            k = as_rational(other)
            return Polynomial(self._dimension, {e: c * k for e, c in self._terms.items()})
        self._check(other)
        terms: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Polynomial(self._dimension, terms)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Polynomial":
        return self * (1 / as_rational(other))

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = Polynomial.constant(1, self._dimension)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self._dimension == other._dimension and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(other, self._dimension)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._dimension, frozenset(self._terms.items())))
        return self._hash

    def __call__(self, *x):
        if len(x) == 1 and isinstance(x[0], (list, tuple)):
            x = x[0]
        return evaluate(self, x)

    def __repr__(self) -> str:
        return f"Polynomial({self._dimension}, {self!s})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.items():
            mono = "*".join(
                f"x{i + 1}" if a == 1 else f"x{i + 1}^{a}" for i, a in enumerate(e) if a
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # float fast path for measurement code

    def evaluate_array(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at each row of ``points`` (shape ``(n, d)``) in float64."""
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self._dimension:
            raise DimensionError(f"expected points of shape (n, {self._dimension})")
        out = np.zeros(points.shape[0])
        for e, c in self._terms.items():
            term = np.full(points.shape[0], float(c))
            for i, a in enumerate(e):
                if a:
                    term = term * points[:, i] ** a
            out += term
        return out


def _vector(x: Sequence, dimension: int, what: str = "vector") -> tuple[Fraction, ...]:
    if len(x) != dimension:
        raise DimensionError(f"{what} has length {len(x)}, expected {dimension}")
    return tuple(as_rational(v) for v in x)


def evaluate(p: Polynomial, x: Sequence[Scalar]) -> Fraction:
    """Exact value of ``p`` at the rational point ``x``."""
    x = _vector(x, p.dimension, "point")
    total = Fraction(0)
    for e, c in p._terms.items():
        term = c
        for xi, a in zip(x, e):
            if a:
                term *= xi**a
        total += term
    return total


def shift(p: Polynomial, y: Sequence[Scalar]) -> Polynomial:
    """Return ``q`` with ``q(x) = p(x + y)``, by per-variable binomial expansion."""
    y = _vector(y, p.dimension, "shift")
    if not any(y):
        return p
    terms: dict[Exponent, Fraction] = {}
    for e, c in p._terms.items():
        # (x_i + y_i)^a = sum_k C(a, k) y_i^(a-k) x_i^k
        factors = [
            [(k, math.comb(a, k) * yi ** (a - k)) for k in range(a + 1) if yi or k == a]
            for a, yi in zip(e, y)
        ]
        for combo in product(*factors):
            coeff = c
            for _, w in combo:
                coeff *= w
            if coeff:
                key = tuple(k for k, _ in combo)
                terms[key] = terms.get(key, 0) + coeff
    return Polynomial(p.dimension, terms)


def difference(p: Polynomial, y: Sequence[Scalar]) -> Polynomial:
    """The forward difference ``D_y p = p(. + y) - p``."""
    return shift(p, y) - p


@dataclass(frozen=True)
class DifferenceOperator:
    """Commuting product of difference operators ``D_v^k``.

    ``factors`` is a tuple of ``(vector, multiplicity)`` pairs; equal vectors are
    merged. The order of factors never affects :func:`apply_operator`.
    """

    factors: tuple[tuple[tuple[Fraction, ...], int], ...]

    def __init__(self, factors: Iterable[tuple[Sequence[Scalar], int]] = ()):
        merged: dict[tuple[Fraction, ...], int] = {}
        order = []
        for vector, mult in factors:
            v = tuple(as_rational(a) for a in vector)
            if not any(v):
                raise ValueError("difference operator factor must be a nonzero vector")
            if int(mult) < 1:
                raise ValueError("multiplicity must be a positive integer")
            if v not in merged:
                order.append(v)
                merged[v] = 0
            merged[v] += int(mult)
        dims = {len(v) for v in order}
        if len(dims) > 1:
            raise DimensionError("factor vectors have different lengths")
        object.__setattr__(self, "factors", tuple((v, merged[v]) for v in order))

    @classmethod
    def of(cls, *vectors: Sequence[Scalar]) -> "DifferenceOperator":
        return cls((v, 1) for v in vectors)

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.factors)

    def vectors(self) -> list[tuple[Fraction, ...]]:
        """Factor vectors, repeated by multiplicity."""
        return [v for v, m in self.factors for _ in range(m)]

    def __str__(self) -> str:
        if not self.factors:
            return "I"
        parts = []
        for v, m in self.factors:
            unit = [i for i, a in enumerate(v) if a]
            if len(unit) == 1 and v[unit[0]] == 1:
                label = f"e{unit[0] + 1}"
            else:
                label = "(" + ",".join(str(a) for a in v) + ")"
            parts.append(f"D_{{{label}}}" + (f"^{m}" if m > 1 else ""))
        return "".join(parts)


def apply_operator(op: DifferenceOperator, p: Polynomial) -> Polynomial:
    for v, mult in op.factors:
        if len(v) != p.dimension:
            raise DimensionError(f"operator vector {v} does not match dimension {p.dimension}")
    for v in op.vectors():
        if p.is_zero():
            break
        p = difference(p, v)
    return p


def _power_of_linear(row: tuple[Fraction, ...], k: int, cache: dict) -> Polynomial:
    key = (row, k)
    if key not in cache:
        if k == 0:
            cache[key] = Polynomial.constant(1, len(row))
        else:
            cache[key] = _power_of_linear(row, k - 1, cache) * Polynomial.linear_form(row)
    return cache[key]


def compose_linear(p: Polynomial, matrix: Sequence[Sequence[Scalar]]) -> Polynomial:
    """Pull back ``p`` along ``x -> L x`` for the ``m x d`` rational matrix ``L``."""
    if len(matrix) != p.dimension:
        raise DimensionError(
            f"matrix has {len(matrix)} rows, polynomial has dimension {p.dimension}"
        )
    if not matrix:
        raise DimensionError("cannot infer target dimension from an empty matrix")
    d = len(matrix[0])
    rows = [_vector(r, d, "matrix row") for r in matrix]
    cache: dict = {}
    result = Polynomial.zero(d)
    for e, c in p._terms.items():
        term = Polynomial.constant(c, d)
        for row, a in zip(rows, e):
            if a:
                term = term * _power_of_linear(row, a, cache)
        result = result + term
    return result

from fractions import Fraction

from hypothesis import settings, strategies as st

from sublevel.exactpoly import Polynomial

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

rationals = st.fractions(min_value=-6, max_value=6, max_denominator=5)
small_ints = st.integers(min_value=-3, max_value=3)


@st.composite
def polynomials(draw, dimension, max_degree=4, max_terms=5):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        deg = draw(st.integers(0, max_degree))
        e = [0] * dimension
        for _ in range(deg):
            e[draw(st.integers(0, dimension - 1))] += 1
        terms[tuple(e)] = draw(rationals)
    return Polynomial(dimension, terms)


def vectors(d, elements=small_ints):
    return st.lists(elements, min_size=d, max_size=d).map(tuple)


def nonzero_vectors(d):
    return vectors(d).filter(any)


def matrices(rows, cols, elements=small_ints):
    return st.lists(vectors(cols, elements), min_size=rows, max_size=rows)


F = Fraction

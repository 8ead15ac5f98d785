import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tenalg import (
    DenseTensor,
    NotInvertibleError,
    TruncatedTensor,
    basis_word,
    concat_product,
    inverse,
    project,
    tensor_product,
    truncated_dim,
    unit,
    word_to_index,
)
from tenalg.algebra import dump_tt, load_tt, tt_from_json

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=3)


def tt(d, N, flat_levels):
    return TruncatedTensor.from_flat_levels(d, N, flat_levels)


@st.composite
def elements(draw, d=None, N=None, nonzero_scalar=False):
    d = d if d is not None else draw(st.integers(1, 3))
    N = N if N is not None else draw(st.integers(0, 3))
    levels = []
    for n in range(N + 1):
        levels.append([draw(rationals) for _ in range(d**n)])
    if nonzero_scalar and levels[0][0] == 0:
        levels[0][0] = F(1)
    return tt(d, N, levels)


@st.composite
def element_pairs(draw, count=2, nonzero_scalar=False):
    d = draw(st.integers(1, 3))
    N = draw(st.integers(0, 3))
    return tuple(
        draw(elements(d=d, N=N, nonzero_scalar=nonzero_scalar)) for _ in range(count)
    )


# -- unit ----------------------------------------------------------------------


def test_unit_shape():
    e = unit(2, 2)
    assert e.scalar_part() == 1
    assert e.level(1) == DenseTensor.zeros((2,))
    assert e.level(2) == DenseTensor.zeros((2, 2))
    assert unit(1, 0).levels[0] == DenseTensor.scalar(1)


@settings(deadline=None)
@given(elements())
def test_unit_laws(x):
    e = unit(x.d, x.N)
    assert concat_product(e, x) == x
    assert concat_product(x, e) == x


# -- words ----------------------------------------------------------------------


def test_word_to_index_examples():
    assert word_to_index((1, 1, 1), 3) == 0
    assert word_to_index((1,), 5) == 0
    assert word_to_index((1, 2), 2) == 1
    assert word_to_index((2, 2), 2) == 3
    assert word_to_index((), 2) == 0


def test_word_to_index_is_lexicographic_bijection():
    for d in (1, 2, 3):
        for n in range(4):
            words = list(itertools.product(range(1, d + 1), repeat=n))
            indices = [word_to_index(w, d) for w in words]
            assert indices == list(range(d**n))


def test_word_to_index_rejects_bad_letter():
    with pytest.raises(IndexError):
        word_to_index((1, 3), 2)
    with pytest.raises(IndexError):
        word_to_index((0,), 2)


def test_concat_is_word_concatenation():
    e12 = basis_word(3, 3, (1, 2))
    e3 = basis_word(3, 3, (3,))
    assert concat_product(e12, e3) == basis_word(3, 3, (1, 2, 3))


def test_word_coefficient():
    x = basis_word(2, 2, (2, 1))
    assert x.word_coefficient((2, 1)) == 1
    assert x.word_coefficient((1, 2)) == 0


# -- product ---------------------------------------------------------------------


def test_product_level2_fixture():
    x = tt(2, 2, [[2], [1, 0], [0, 0, 0, 0]])
    y = tt(2, 2, [[3], [0, 1], [0, 0, 0, 0]])
    assert concat_product(x, y) == tt(2, 2, [[6], [3, 2], [0, 1, 0, 0]])


def test_product_incompatible():
    with pytest.raises(ValueError):
        concat_product(unit(2, 2), unit(2, 3))
    with pytest.raises(ValueError):
        concat_product(unit(2, 2), unit(3, 2))


def test_product_field_mismatch():
    from tenalg import FieldMismatchError

    with pytest.raises(FieldMismatchError):
        concat_product(unit(2, 2), unit(2, 2, "real"))


def test_product_not_commutative():
    x = tt(2, 2, [[0], [1, 0], [0, 0, 0, 0]])
    y = tt(2, 2, [[0], [0, 1], [0, 0, 0, 0]])
    assert concat_product(x, y) != concat_product(y, x)


@settings(deadline=None)
@given(element_pairs(count=3))
def test_associativity(xyz):
    x, y, z = xyz
    assert concat_product(concat_product(x, y), z) == concat_product(x, concat_product(y, z))


@settings(deadline=None)
@given(element_pairs(count=3))
def test_distributivity(xyz):
    x, y, z = xyz
    assert concat_product(x + y, z) == concat_product(x, z) + concat_product(y, z)
    assert concat_product(z, x + y) == concat_product(z, x) + concat_product(z, y)


@settings(deadline=None)
@given(rationals, element_pairs())
def test_scalar_bilinearity(lam, xy):
    x, y = xy
    expected = concat_product(x, y).scale(lam)
    assert concat_product(x.scale(lam), y) == expected
    assert concat_product(x, y.scale(lam)) == expected


# -- inverse ----------------------------------------------------------------------


def test_inverse_fixture():
    x = tt(2, 2, [[2], [1, 0], [1, 0, 0, 0]])
    assert inverse(x) == tt(2, 2, [[F(1, 2)], [F(-1, 4), 0], [F(-1, 8), 0, 0, 0]])


def test_inverse_of_unit():
    assert inverse(unit(2, 3)) == unit(2, 3)


def test_inverse_requires_nonzero_scalar():
    x = tt(2, 2, [[0], [1, 1], [1, 0, 0, 1]])
    with pytest.raises(NotInvertibleError):
        inverse(x)


@settings(deadline=None)
@given(elements(nonzero_scalar=True))
def test_two_sided_inverse(x):
    e = unit(x.d, x.N)
    y = inverse(x)
    assert concat_product(x, y) == e
    assert concat_product(y, x) == e


@settings(deadline=None)
@given(elements(N=2, nonzero_scalar=True))
def test_inverse_matches_level2_closed_form(x):
    a = x.scalar_part()
    v = x.level(1)
    A = x.level(2)
    inv_a = 1 / a
    expected = TruncatedTensor(
        x.d,
        2,
        [
            DenseTensor.scalar(inv_a),
            DenseTensor(v.shape, [-inv_a**2 * c for c in v.coeffs]),
            DenseTensor(
                A.shape,
                [
                    -inv_a**2 * c + inv_a**3 * t
                    for c, t in zip(A.coeffs, tensor_product(v, v).coeffs)
                ],
            ),
        ],
    )
    assert inverse(x) == expected


# -- projection --------------------------------------------------------------------


def test_project_identity_and_scalar():
    x = tt(2, 2, [[5], [1, 2], [1, 0, 0, 1]])
    assert project(x, 2) == x
    assert project(x, 0).levels[0] == DenseTensor.scalar(5)


def test_project_out_of_range():
    with pytest.raises(ValueError):
        project(unit(2, 2), 3)


@settings(deadline=None)
@given(element_pairs(), st.integers(0, 3))
def test_projection_is_product_morphism(xy, M):
    x, y = xy
    M = min(M, x.N)
    lhs = project(concat_product(x, y), M)
    rhs = concat_product(project(x, M), project(y, M))
    assert lhs == rhs


# -- dimension ----------------------------------------------------------------------


def test_truncated_dim_values():
    assert truncated_dim(2, 2) == 7
    assert truncated_dim(3, 0) == 1
    assert truncated_dim(7, 0) == 1
    assert truncated_dim(3, 3) == 40
    assert truncated_dim(1, 4) == 5


def test_truncated_dim_matches_word_enumeration():
    for d in (1, 2, 3):
        for N in range(5):
            count = sum(
                1
                for n in range(N + 1)
                for _ in itertools.product(range(1, d + 1), repeat=n)
            )
            assert truncated_dim(d, N) == count


# -- degree ------------------------------------------------------------------------


def test_degree():
    assert tt(2, 2, [[0], [0, 0], [0, 0, 0, 0]]).degree() == 0
    assert tt(2, 2, [[1], [0, 0], [0, 0, 0, 0]]).degree() == 0
    assert tt(2, 2, [[1], [1, 0], [0, 0, 0, 0]]).degree() == 1
    assert tt(2, 2, [[0], [0, 0], [0, 1, 0, 0]]).degree() == 2


# -- JSON --------------------------------------------------------------------------


def test_json_round_trip():
    x = tt(2, 2, [[F(1, 2)], [1, -2], [0, F(3, 4), 0, 1]])
    assert load_tt(dump_tt(x)) == x


def test_json_ignores_extra_keys():
    x = unit(2, 1)
    obj = {"d": 2, "N": 1, "field": "rational", "levels": [["1"], ["0", "0"]],
           "interval": [0.0, 1.0]}
    assert tt_from_json(obj) == x


def test_json_golden_shape():
    text = dump_tt(unit(2, 2))
    assert text == (
        '{"d": 2, "N": 2, "field": "rational", '
        '"levels": [["1"], ["0", "0"], ["0", "0", "0", "0"]]}'
    )

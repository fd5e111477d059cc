import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcrepair.galois import (
    GF,
    FieldMatrix,
    SingularMatrixError,
    find_irreducible,
    identity,
    inverse,
    is_irreducible,
    mat_mul,
    mat_rank,
    poly_mod,
    poly_mul,
    random_matrix,
    solve_linear,
)

FIELDS = [GF(2), GF(31), GF(257), GF(2, 5), GF(3, 3), GF(2, 8)]


def schoolbook(a: FieldMatrix, b: FieldMatrix) -> list[list[int]]:
    F = a.field
    out = []
    for i in range(a.rows):
        row = []
        for j in range(b.cols):
            acc = 0
            for t in range(a.cols):
                acc = F.add(acc, F.poly_mul_reduce(a.row(i)[t], b.row(t)[j]) if not F.is_prime_field
                            else (a.row(i)[t] * b.row(t)[j]) % F.order)
            row.append(acc)
        out.append(row)
    return out


def test_prime_field_examples():
    F = GF(31)
    assert F.mul(13, 3) == 8
    assert F.inv(1) == 1
    assert F.element(13) * 3 == F.element(8)


def test_gf32_reduction_matches_long_division():
    F = GF(2, 5)
    poly = F.reduction_polynomial
    assert is_irreducible(poly, 2)
    x, x4 = F.element((0, 1, 0, 0, 0)), F.element((0, 0, 0, 0, 1))
    expected = poly_mod([0, 0, 0, 0, 0, 1], poly, 2)
    expected += [0] * (5 - len(expected))
    assert (x * x4).value == tuple(expected)


def test_bad_field_parameters():
    with pytest.raises(ValueError):
        GF(15)
    with pytest.raises(ValueError):
        GF(2, 2, poly=(1, 0, 1))  # x^2 + 1 = (x + 1)^2 over GF(2)
    with pytest.raises(ZeroDivisionError):
        GF(7).inv(0)


def test_find_irreducible_has_no_roots():
    for p, m in [(2, 3), (2, 5), (3, 2), (5, 3)]:
        poly = find_irreducible(p, m)
        assert all(sum(c * x ** i for i, c in enumerate(poly)) % p for x in range(p))


def test_poly_mul_then_mod_is_zero():
    a, b = [1, 2, 3], [4, 0, 1]
    assert poly_mod(poly_mul(a, b, 7), b, 7) == []


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_log_tables_match_schoolbook(F):
    rng = random.Random(1)
    for _ in range(200):
        a, b = rng.randrange(F.order), rng.randrange(F.order)
        if F.is_prime_field:
            assert F.mul(a, b) == a * b % F.order
        else:
            assert F.mul(a, b) == F.poly_mul_reduce(a, b)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(FIELDS), st.data())
def test_field_axioms(F, data):
    a, b, c = (data.draw(st.integers(0, F.order - 1)) for _ in range(3))
    assert F.sub(F.add(a, b), b) == a
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(a, b) == F.mul(b, a)
    assert F.add(a, F.neg(a)) == 0
    if a:
        assert F.mul(a, F.inv(a)) == 1
        assert F.div(F.mul(b, a), a) == b


def test_identity_times_matrix():
    F = GF(257)
    G = random_matrix(F, 8, 16, random.Random(0))
    assert mat_mul(identity(F, 8), G) == G


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_mat_mul_matches_triple_loop(F):
    rng = random.Random(2)
    a, b = random_matrix(F, 3, 3, rng), random_matrix(F, 3, 4, rng)
    assert mat_mul(a, b).to_lists() == schoolbook(a, b)


def test_mat_mul_shape_mismatch():
    F = GF(7)
    with pytest.raises(ValueError):
        mat_mul(FieldMatrix.zeros(F, 2, 3), FieldMatrix.zeros(F, 2, 3))


def test_rank_examples():
    F = GF(257)
    assert mat_rank(FieldMatrix.zeros(F, 3, 5)) == 0
    rng = random.Random(3)
    rows = random_matrix(F, 4, 5, rng).to_lists()
    singular = FieldMatrix(F, rows + [rows[1]])
    assert mat_rank(singular) <= 4


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FIELDS), st.integers(1, 5), st.integers(1, 5), st.integers(1, 5), st.integers(0, 10 ** 6))
def test_rank_of_product_bounded(F, m, n, p, seed):
    rng = random.Random(seed)
    a, b = random_matrix(F, m, n, rng), random_matrix(F, n, p, rng)
    r = mat_rank(mat_mul(a, b))
    assert r <= min(mat_rank(a), mat_rank(b)) <= min(m, n, p)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FIELDS), st.integers(1, 6), st.integers(0, 10 ** 6))
def test_solve_round_trip(F, n, seed):
    rng = random.Random(seed)
    while True:
        a = random_matrix(F, n, n, rng)
        if mat_rank(a) == n:
            break
    y0 = random_matrix(F, n, 2, rng)
    assert solve_linear(a, mat_mul(a, y0)) == y0
    assert mat_mul(a, inverse(a)) == identity(F, n)


def test_solve_identity_and_singular():
    F = GF(31)
    v = FieldMatrix.column(F, [1, 2, 3])
    assert solve_linear(identity(F, 3), v) == v
    with pytest.raises(SingularMatrixError):
        solve_linear(FieldMatrix(F, [[1, 2], [2, 4]]), FieldMatrix.column(F, [1, 1]))


def test_field_element_value_forms():
    assert GF(257).element(300).value == 43
    assert GF(2, 5).element(5).value == (1, 0, 1, 0, 0)
    with pytest.raises(ValueError):
        GF(2, 5).element(40)

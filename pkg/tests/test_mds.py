import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcrepair.galois import GF, FieldMatrix, identity, mat_mul, mat_rank
from bcrepair.mds import (
    Placement,
    decode_any_k,
    encode,
    is_mds_subset,
    join_file,
    make_mds,
    split_file,
    systematic_identity_check,
)


def test_single_symbol_code_is_identity():
    code = make_mds(1, 1, GF(7))
    assert code.generator == identity(GF(7), 1)


def test_small_code_all_submatrices():
    code = make_mds(2, 4, GF(17))
    subsets = list(combinations(range(4), 2))
    assert len(subsets) == 6
    assert all(is_mds_subset(code, s) for s in subsets)


def test_16_8_code_every_subset_full_rank():
    code = make_mds(8, 16, GF(257))
    assert mat_rank(code.generator) == 8
    assert all(is_mds_subset(code, s) for s in combinations(range(16), 8))


def test_field_too_small():
    with pytest.raises(ValueError):
        make_mds(8, 16, GF(13))
    with pytest.raises(ValueError):
        make_mds(5, 4, GF(257))


def test_zero_file_encodes_to_zero():
    code = make_mds(3, 6, GF(31))
    assert encode([[0, 0]] * 3, code) == [[0, 0]] * 6


def test_encode_is_w_times_g():
    F = GF(257)
    code = make_mds(8, 16, F)
    rng = random.Random(4)
    W = [[rng.randrange(257)] for _ in range(8)]
    row = FieldMatrix(F, [[w[0] for w in W]])
    P = mat_mul(row, code.generator).to_lists()[0]
    assert [p[0] for p in encode(W, code)] == P


def test_encode_size_mismatch():
    code = make_mds(2, 4, GF(17))
    with pytest.raises(ValueError):
        encode([[1]], code)
    with pytest.raises(ValueError):
        encode([[1], [1, 2]], code)


def test_systematic_read_off():
    F = GF(257)
    code = make_mds(4, 8, F, systematic=True)
    assert systematic_identity_check(code)
    W = [[1, 2], [3, 4], [5, 6], [7, 8]]
    coded = encode(W, code)
    assert coded[:4] == W
    assert all(is_mds_subset(code, s) for s in combinations(range(8), 4))


def test_any_two_nodes_decode_in_example_placement():
    F = GF(257)
    code = make_mds(8, 16, F)
    place = Placement(4, 4)
    rng = random.Random(5)
    W = [[rng.randrange(257) for _ in range(3)] for _ in range(8)]
    coded = encode(W, code)
    for a, b in combinations(range(1, 5), 2):
        cols = place.columns(a) + place.columns(b)
        assert decode_any_k(cols, [coded[c] for c in cols], code) == W


def test_placement_partitions_columns():
    place = Placement(4, 4)
    assert place.columns(1) == [0, 1, 2, 3]
    assert place.columns(4) == [12, 13, 14, 15]
    seen = sorted(c for j in range(1, 5) for c in place.columns(j))
    assert seen == list(range(place.total))
    assert all(place.node_of(c) == j for j in range(1, 5) for c in place.columns(j))
    with pytest.raises(ValueError):
        place.columns(5)


def test_decode_argument_checks():
    code = make_mds(2, 4, GF(17))
    with pytest.raises(ValueError):
        decode_any_k([0, 0], [[1], [1]], code)
    with pytest.raises(ValueError):
        decode_any_k([0, 1], [[1]], code)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 6), st.integers(0, 10 ** 6))
def test_round_trip_random_subset(k, extra, seed):
    rng = random.Random(seed)
    F = GF(257)
    n = k + extra
    code = make_mds(k, n, F)
    symbols = [rng.randrange(257) for _ in range(rng.randrange(1, 20))]
    packets, length = split_file(symbols, k)
    coded = encode(packets, code)
    cols = rng.sample(range(n), k)
    decoded = decode_any_k(cols, [coded[c] for c in cols], code)
    assert join_file(decoded, length) == symbols


def test_split_pads_with_zeros():
    packets, length = split_file([1, 2, 3, 4, 5], 2)
    assert packets == [[1, 2, 3], [4, 5, 0]]
    assert join_file(packets, length) == [1, 2, 3, 4, 5]


def test_extension_field_code():
    F = GF(2, 5)
    code = make_mds(4, 8, F)
    assert all(is_mds_subset(code, s) for s in combinations(range(8), 4))
    W = [[3], [17], [0], [31]]
    coded = encode(W, code)
    assert decode_any_k([7, 2, 5, 0], [coded[c] for c in (7, 2, 5, 0)], code) == W

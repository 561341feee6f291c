from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmask.dft_core import fftshift
from kmask.mask_gen import (
    MaskSpec,
    SamplingMask,
    add_center_lines,
    custom_mask,
    default_negative_offset,
    equispaced_mask,
    extend_mask_2d,
    full_mask,
    offset_mask_irregular,
    random_mask,
    sampling_fraction,
    shift_mask,
)

from conftest import complex_normal


def idx(mask):
    return mask.indices.tolist()


@pytest.mark.parametrize(
    "n, r, offset, expected",
    [(12, 4, 0, [0, 4, 8]), (12, 4, 1, [1, 5, 9]), (8, 2, 0, [0, 2, 4, 6])],
)
def test_equispaced_examples(n, r, offset, expected):
    mask = equispaced_mask(n, r, offset)
    assert idx(mask) == expected
    assert mask.layout == "unshifted"
    assert not mask.misaligned


@pytest.mark.parametrize("offset", [-1, 4, 7])
def test_equispaced_offset_out_of_range(offset):
    with pytest.raises(ValueError):
        equispaced_mask(12, 4, offset)


def test_equispaced_rejects_small_acceleration():
    with pytest.raises(ValueError):
        equispaced_mask(12, 1, 0)


def test_equispaced_non_multiple_sets_warning_flag():
    mask = equispaced_mask(13, 4, 1)
    assert mask.misaligned
    assert idx(mask) == [1, 5, 9]


def test_equispaced_empty_mask_rejected():
    with pytest.raises(ValueError):
        equispaced_mask(2, 4, 3)


def hand_algorithm1(n, r, pos, neg):
    """Literal transcription of the positive/negative split construction."""
    poslen = (n + 1) // 2
    neglen = n - poslen
    mp = [0] * poslen
    mn = [0] * neglen
    for i in range(pos, poslen, r):
        mp[i] = 1
    for i in range(neg, neglen, r):
        mn[i] = 1
    return [i for i, b in enumerate(mp + mn[::-1]) if b]


@pytest.mark.parametrize(
    "n, expected",
    [(12, [1, 5, 9]), (13, [1, 5, 10]), (10, [1, 7])],
)
def test_irregular_examples(n, expected):
    mask = offset_mask_irregular(n, 4, 1, 2)
    assert idx(mask) == expected
    assert idx(mask) == hand_algorithm1(n, 4, 1, 2)


def test_irregular_n12_equals_naive():
    assert np.array_equal(offset_mask_irregular(12, 4, 1, 2).bits, equispaced_mask(12, 4, 1).bits)


def test_irregular_rejects_bad_offsets():
    with pytest.raises(ValueError):
        offset_mask_irregular(12, 4, 1, 4)
    with pytest.raises(ValueError):
        offset_mask_irregular(12, 4, 5, 2)
    with pytest.raises(ValueError):
        offset_mask_irregular(1, 4, 0, 0)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 300), st.integers(2, 9), st.data())
def test_irregular_matches_transcription(n, r, data):
    pos = data.draw(st.integers(0, r - 1))
    neg = data.draw(st.integers(0, r - 1))
    expected = hand_algorithm1(n, r, pos, neg)
    if not expected:
        with pytest.raises(ValueError):
            offset_mask_irregular(n, r, pos, neg)
    else:
        assert idx(offset_mask_irregular(n, r, pos, neg)) == expected


@pytest.mark.parametrize("r, expected", [(4, 2), (2, 0), (3, 1), (8, 6)])
def test_default_negative_offset(r, expected):
    assert default_negative_offset(r) == expected


def test_default_negative_offset_r2_matches_odd_lines():
    for n in range(2, 40, 2):
        mask = offset_mask_irregular(n, 2, 1, default_negative_offset(2))
        assert idx(mask) == [k for k in range(n) if k % 2 == 1]


def test_default_negative_offset_r3_matches_naive():
    for n in range(3, 60, 3):
        assert np.array_equal(
            offset_mask_irregular(n, 3, 1, 1).bits, equispaced_mask(n, 3, 1).bits
        )


@pytest.mark.parametrize("r", [2, 3, 4, 8])
def test_algorithm1_equivalent_to_naive(r):
    for n in range(r, 129, r):
        got = offset_mask_irregular(n, r, 1, default_negative_offset(r))
        assert np.array_equal(got.bits, equispaced_mask(n, r, 1).bits), n


@pytest.mark.parametrize("n, r", [(12, 4), (24, 3), (16, 8), (10, 2), (60, 5)])
def test_offsets_partition_index_set(n, r):
    stack = np.array([equispaced_mask(n, r, o).bits for o in range(r)], dtype=int)
    np.testing.assert_array_equal(stack.sum(axis=0), np.ones(n))


def test_center_lines_examples():
    mask = equispaced_mask(12, 4, 1)
    assert idx(add_center_lines(mask, 4)) == [0, 1, 5, 9, 10, 11]
    assert add_center_lines(mask, 0) == mask
    sparse = custom_mask(np.eye(32, dtype=bool)[20])
    got = add_center_lines(sparse, 16)
    assert set(idx(got)) == set(range(8)) | set(range(24, 32)) | {20}


def test_center_lines_odd_count_keeps_dc_side():
    got = add_center_lines(custom_mask(np.eye(10, dtype=bool)[5]), 3)
    assert idx(got) == [0, 1, 5, 9]


def test_center_lines_rejects_shifted():
    with pytest.raises(ValueError):
        add_center_lines(shift_mask(equispaced_mask(12, 4, 1)), 2)


def test_center_lines_count_bounds():
    with pytest.raises(ValueError):
        add_center_lines(equispaced_mask(12, 4, 1), 13)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.booleans(), min_size=1, max_size=40), st.data())
def test_center_lines_idempotent_and_monotone(bits, data):
    bits = np.array(bits)
    if not bits.any():
        bits[0] = True
    mask = custom_mask(bits)
    count = data.draw(st.integers(0, bits.size))
    once = add_center_lines(mask, count)
    assert np.all(once.bits[mask.bits])
    assert np.array_equal(add_center_lines(once, count).bits, once.bits)
    assert once.bits.sum() == np.count_nonzero(bits | np.isin(np.arange(bits.size), once.indices))


def test_random_mask_cardinality_and_determinism():
    a = random_mask(64, 4, seed=3)
    assert a.bits.sum() == 16
    assert random_mask(64, 4, seed=3) == a
    assert not np.array_equal(random_mask(64, 4, seed=4).bits, a.bits)


def test_random_mask_with_center():
    mask = random_mask(64, 4, seed=11, center=16)
    assert mask.bits.sum() == 16
    assert set(range(8)) | set(range(56, 64)) <= set(idx(mask))
    mask = random_mask(64, 4, seed=11, center=6)
    assert mask.bits.sum() == 16
    assert {0, 1, 2, 61, 62, 63} <= set(idx(mask))


def test_random_mask_too_many_center_lines():
    with pytest.raises(ValueError):
        random_mask(64, 4, seed=0, center=17)


def test_random_mask_rounds_half_up():
    assert random_mask(10, 4, seed=0).bits.sum() == 3  # 2.5 -> 3
    assert random_mask(1, 3, seed=0).bits.sum() == 1


def test_random_mask_needs_seed():
    with pytest.raises(ValueError):
        MaskSpec(width=8, acceleration=4, kind="random")


def test_random_mask_uses_pcg64_stream():
    # pins the generator so masks stay reproducible across releases
    rng = np.random.Generator(np.random.PCG64(5))
    expected = sorted(rng.choice(np.arange(32), size=8, replace=False).tolist())
    assert idx(random_mask(32, 4, seed=5)) == expected


def test_shift_mask_example():
    shifted = shift_mask(equispaced_mask(12, 4, 0))
    assert shifted.layout == "shifted"
    assert idx(shifted) == [2, 6, 10]


@pytest.mark.parametrize("n", list(range(1, 25)))
def test_shift_mask_round_trip(n):
    bits = np.zeros(n, dtype=bool)
    bits[[0, n - 1]] = True
    mask = custom_mask(bits)
    assert shift_mask(shift_mask(mask)) == mask


def test_shift_twice_even_is_involution_on_bits():
    mask = equispaced_mask(12, 4, 1)
    once = shift_mask(mask)
    np.testing.assert_array_equal(np.roll(once.bits, 6), mask.bits)


@pytest.mark.parametrize("n", [12, 13])
def test_shifted_mask_commutes_with_fftshift(rng, n):
    for r, offset in [(4, 0), (4, 1), (3, 2), (2, 1)]:
        mask = equispaced_mask(n, r, offset)
        X = complex_normal(rng, n)
        lhs = np.where(shift_mask(mask).bits, fftshift(X), 0)
        rhs = fftshift(np.where(mask.bits, X, 0))
        np.testing.assert_array_equal(lhs, rhs)


def test_extend_mask_2d():
    mask = equispaced_mask(12, 4, 0)
    img = extend_mask_2d(mask, 2)
    assert img.shape == (2, 12)
    np.testing.assert_array_equal(img[0], img[1])
    img = extend_mask_2d(mask, 3, axis="cols")
    for row in img:
        assert np.flatnonzero(row).tolist() == [0, 4, 8]
    img = extend_mask_2d(mask, 3, axis="rows")
    assert img.shape == (12, 3)
    assert np.flatnonzero(img[:, 2]).tolist() == [0, 4, 8]
    coils = np.stack([extend_mask_2d(mask, 5)] * 4)
    assert all(np.array_equal(c, coils[0]) for c in coils)
    with pytest.raises(ValueError):
        extend_mask_2d(mask, 0)
    with pytest.raises(ValueError):
        extend_mask_2d(mask, 2, axis="diag")


def test_sampling_fraction():
    assert sampling_fraction(equispaced_mask(12, 4, 1)) == Fraction(1, 4)
    assert sampling_fraction(offset_mask_irregular(13, 4, 1, 2)) == Fraction(3, 13)
    assert sampling_fraction(full_mask(9)) == 1


def test_mask_bits_are_read_only():
    mask = equispaced_mask(12, 4, 1)
    with pytest.raises(ValueError):
        mask.bits[0] = True


def test_mask_invariants():
    spec = MaskSpec(width=4, acceleration=1, kind="custom")
    with pytest.raises(ValueError):
        SamplingMask(np.zeros(4, dtype=bool), "unshifted", spec)
    with pytest.raises(ValueError):
        SamplingMask(np.ones(4, dtype=bool), "sideways", spec)
    with pytest.raises(ValueError):
        SamplingMask(np.ones(5, dtype=bool), "unshifted", spec)
    with pytest.raises(ValueError):
        MaskSpec(width=4, acceleration=4, kind="equispaced", offset_pos=0, center_lines=5)

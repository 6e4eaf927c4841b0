import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trajindex.succinct import (
    BitVector,
    PackedIntArray,
    SparseBitVector,
    UnaryDeltaStream,
)


def brute(bits):
    """(cumulative ones, positions of ones, positions of zeros)."""
    arr = np.asarray(bits, dtype=np.int64)
    return (np.concatenate([[0], np.cumsum(arr)]),
            list(np.flatnonzero(arr) + 1),
            list(np.flatnonzero(1 - arr) + 1))


class TestBitVector:
    def test_known_small(self):
        # B = 1011
        bv = BitVector.from_bits([1, 0, 1, 1])
        assert len(bv) == 4 and bv.count_ones == 3
        assert [bv.access(i) for i in range(1, 5)] == [1, 0, 1, 1]
        assert [bv.rank1(i) for i in range(5)] == [0, 1, 1, 2, 3]
        assert bv.rank0(3) == 1
        assert [bv.select1(j) for j in (1, 2, 3)] == [1, 3, 4]
        assert bv.select0(1) == 2

    def test_empty(self):
        bv = BitVector.from_bits([])
        assert len(bv) == 0 and bv.count_ones == 0
        assert bv.rank1(0) == 0
        with pytest.raises(ValueError):
            bv.select1(1)
        assert list(bv.ones()) == []

    @pytest.mark.parametrize("density", [0.01, 0.1, 0.5, 0.95])
    @pytest.mark.parametrize("n", [1, 64, 65, 511, 512, 513, 5000])
    def test_matches_brute_force(self, density, n):
        rng = np.random.default_rng(int(density * 100) * 7919 + n)
        bits = (rng.random(n) < density).astype(np.uint8)
        bv = BitVector.from_bits(bits)
        cum, ones, zeros = brute(bits)
        assert bv.count_ones == len(ones)
        for i in range(n + 1):
            assert bv.rank1(i) == cum[i]
            assert bv.rank0(i) == i - cum[i]
        assert [bv.select1(j) for j in range(1, len(ones) + 1)] == ones
        assert [bv.select0(j) for j in range(1, len(zeros) + 1)] == zeros
        assert list(bv.ones()) == ones
        assert list(bv.zeros()) == zeros

    @given(st.lists(st.booleans(), max_size=300), st.data())
    @settings(max_examples=60, deadline=None)
    def test_rank_select_inverse(self, bits, data):
        bv = BitVector.from_bits(bits)
        if bv.count_ones:
            j = data.draw(st.integers(1, bv.count_ones))
            p = bv.select1(j)
            assert bv.access(p) == 1
            assert bv.rank1(p) == j
            assert bv.rank1(p - 1) == j - 1
        if bv.count_zeros:
            j = data.draw(st.integers(1, bv.count_zeros))
            p = bv.select0(j)
            assert bv.access(p) == 0
            assert bv.rank0(p) == j

    def test_iterators_resume_mid_stream(self):
        rng = np.random.default_rng(5)
        bits = (rng.random(700) < 0.3).astype(np.uint8)
        bv = BitVector.from_bits(bits)
        _, ones, zeros = brute(bits)
        for start in (1, 2, 17, len(ones)):
            assert list(bv.ones(start)) == ones[start - 1:]
        for start in (1, 40, len(zeros)):
            assert list(bv.zeros(start)) == zeros[start - 1:]

    def test_round_trip(self):
        rng = np.random.default_rng(9)
        for n in (0, 3, 64, 1000):
            bv = BitVector.from_bits((rng.random(n) < 0.4).astype(np.uint8))
            back, consumed = BitVector.from_buffer(bv.to_bytes())
            assert consumed == len(bv.to_bytes())
            assert back.to_bytes() == bv.to_bytes()
            assert len(back) == n and back.count_ones == bv.count_ones

    def test_bounds_errors(self):
        bv = BitVector.from_bits([1, 0])
        with pytest.raises(IndexError):
            bv.rank1(3)
        with pytest.raises(IndexError):
            bv.access(0)
        with pytest.raises(ValueError):
            bv.select1(2)
        with pytest.raises(ValueError):
            bv.select0(2)

    def test_truncated_buffer_rejected(self):
        blob = BitVector.from_bits([1, 1, 0]).to_bytes()
        with pytest.raises(ValueError):
            BitVector.from_buffer(blob[:-3])


class TestSparseBitVector:
    def test_known_small(self):
        sv = SparseBitVector.from_positions(32, [3, 7, 20])
        assert len(sv) == 32 and sv.count_ones == 3
        assert sv.select1(2) == 7
        assert sv.rank1(0) == 0 and sv.rank1(7) == 2 and sv.rank1(32) == 3
        assert sv.access(20) == 1 and sv.access(21) == 0
        assert sv.select0(3) == 4  # zeros are 1,2,4,5,6,8,...
        assert list(sv.ones()) == [3, 7, 20]

    def test_rejects_bad_positions(self):
        with pytest.raises(ValueError):
            SparseBitVector.from_positions(10, [0, 4])
        with pytest.raises(ValueError):
            SparseBitVector.from_positions(10, [4, 4])
        with pytest.raises(ValueError):
            SparseBitVector.from_positions(10, [4, 11])

    @given(st.integers(1, 2000), st.data())
    @settings(max_examples=80, deadline=None)
    def test_matches_plain_bitmap(self, n, data):
        m = data.draw(st.integers(0, min(n, 60)))
        rng = np.random.default_rng(data.draw(st.integers(0, 10**6)))
        pos = np.sort(rng.choice(n, size=m, replace=False)) + 1
        sv = SparseBitVector.from_positions(n, pos)
        bits = np.zeros(n, dtype=np.uint8)
        bits[pos - 1] = 1
        cum, ones, zeros = brute(bits)
        probes = data.draw(st.lists(st.integers(0, n), max_size=10))
        for i in probes:
            assert sv.rank1(i) == cum[i]
        assert [sv.select1(j) for j in range(1, m + 1)] == ones
        if zeros:
            j = data.draw(st.integers(1, len(zeros)))
            assert sv.select0(j) == zeros[j - 1]
        assert list(sv.ones()) == ones

    def test_space_stays_near_information_bound(self):
        # code bits within m*ceil(log2(n/m)) + 4m for all shapes tried
        rng = np.random.default_rng(31)
        for n, m in ((100, 1), (10**6, 1), (10**6, 50), (4096, 700),
                     (50_000, 49_000), (64, 64)):
            pos = np.sort(rng.choice(n, size=m, replace=False)) + 1
            sv = SparseBitVector.from_positions(n, pos)
            budget = 4 * m + m * int(np.ceil(np.log2(n / m))) if n > m else 4 * m
            assert sv.code_bits() <= budget, (n, m, sv.code_bits(), budget)

    def test_round_trip(self):
        sv = SparseBitVector.from_positions(1000, [5, 17, 600, 999])
        back, _ = SparseBitVector.from_buffer(sv.to_bytes())
        assert back.to_bytes() == sv.to_bytes()
        assert list(back.ones()) == [5, 17, 600, 999]


class TestUnaryDeltaStream:
    def test_known_values(self):
        st_ = UnaryDeltaStream.from_values([4, 3, 1, 0])
        assert len(st_) == 4 and st_.total == 8
        assert [st_.prefix_sum(i) for i in range(5)] == [0, 4, 7, 8, 8]
        assert [st_.value_at(i) for i in (1, 2, 3, 4)] == [4, 3, 1, 0]
        assert list(st_.prefix_iter()) == [4, 7, 8, 8]
        assert list(st_.prefix_iter(2)) == [8, 8]

    def test_fourth_sum_lands_on_bit_sixteen(self):
        # values 2,1,2,7: the 4th terminator sits at bit 16, so the sum of
        # the first four values is 16 - 4
        st_ = UnaryDeltaStream.from_values([2, 1, 2, 7])
        assert st_._members.select1(4) == 16
        assert st_.prefix_sum(4) == 12

    def test_empty_and_zeroes(self):
        empty = UnaryDeltaStream.from_values([])
        assert empty.total == 0 and list(empty.prefix_iter()) == []
        zs = UnaryDeltaStream.from_values([0, 0, 0])
        assert [zs.prefix_sum(i) for i in range(4)] == [0, 0, 0, 0]

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            UnaryDeltaStream.from_values([1, -2])

    @given(st.lists(st.integers(0, 50), max_size=80))
    @settings(max_examples=80, deadline=None)
    def test_prefix_sums_match_cumsum(self, values):
        st_ = UnaryDeltaStream.from_values(values)
        expect = np.concatenate([[0], np.cumsum(values)]) if values else [0]
        for i in range(len(values) + 1):
            assert st_.prefix_sum(i) == expect[i]
        assert list(st_.prefix_iter()) == list(expect[1:])
        back, _ = UnaryDeltaStream.from_buffer(st_.to_bytes())
        assert back.to_bytes() == st_.to_bytes()


class TestPackedIntArray:
    @pytest.mark.parametrize("width", [0, 1, 5, 16, 31, 64])
    def test_round_trips_values(self, width):
        rng = np.random.default_rng(width)
        top = 1 << width
        vals = rng.integers(0, min(top, 2**63), size=40, dtype=np.uint64)
        if width == 0:
            vals[:] = 0
        pa = PackedIntArray.from_values(vals, width)
        assert len(pa) == 40 and pa.width == width
        assert list(pa) == [int(v) for v in vals]
        back, _ = PackedIntArray.from_buffer(pa.to_bytes())
        assert list(back) == list(pa)

    def test_rejects_oversized_values(self):
        with pytest.raises(ValueError):
            PackedIntArray.from_values([8], 3)
        with pytest.raises(ValueError):
            PackedIntArray.from_values([1], 0)

    def test_bounds(self):
        pa = PackedIntArray.from_values([1, 2, 3], 2)
        with pytest.raises(IndexError):
            pa[3]
        with pytest.raises(IndexError):
            pa[-1]

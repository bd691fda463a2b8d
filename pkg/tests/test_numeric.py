import math
import os
import subprocess
import sys
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from latred.numeric import LogVal, Prng, Rat, logval_of_rat, parse_rat, prng_uniform, round_nearest


class TestRoundNearest:
    def test_examples(self):
        assert round_nearest(Rat(7, 3)) == 2
        assert round_nearest(Rat(-1, 2)) == 0  # tie goes up
        assert round_nearest(Rat(5, 2)) == 3  # tie goes up
        assert round_nearest(Rat(4)) == 4
        assert round_nearest(Rat(-7, 2)) == -3

    def test_unique_integer_in_half_open_window(self):
        # floor(x + 1/2) is the unique integer m with x - 1/2 < m <= x + 1/2
        # (so |x - m| <= 1/2, with the tie taken upward)
        half = Rat(1, 2)
        for k in range(-20, 21):
            x = Rat(k, 4)
            m = round_nearest(x)
            assert x - half < m <= x + half
            assert abs(x - m) <= half
            for other in range(m - 3, m + 4):
                if other != m:
                    assert not (x - half < other <= x + half)

    @given(st.integers(-10**6, 10**6), st.integers(1, 10**4))
    def test_matches_floor_definition(self, num, den):
        x = Rat(num, den)
        assert round_nearest(x) == math.floor(Fraction(num, den) + Fraction(1, 2))


class TestRatExactness:
    @given(
        st.fractions(max_denominator=1000),
        st.fractions(max_denominator=1000),
    )
    def test_add_sub_roundtrip(self, fa, fb):
        a, b = Rat(fa), Rat(fb)
        assert (a + b) - b == a

    @given(
        st.fractions(max_denominator=1000),
        st.fractions(max_denominator=1000).filter(lambda f: f != 0),
    )
    def test_mul_div_roundtrip(self, fa, fb):
        a, b = Rat(fa), Rat(fb)
        assert (a * b) / b == a

    def test_lowest_terms_positive_denominator(self):
        q = Rat(-6, -8)
        assert q.numerator == 3 and q.denominator == 4
        q = Rat(6, -8)
        assert q.numerator == -3 and q.denominator == 4

    def test_parse_rat(self):
        assert parse_rat("99/100") == Rat(99, 100)
        assert parse_rat("1") == Rat(1)
        assert parse_rat("0.99") == Rat(99, 100)


class TestLogVal:
    def test_log_of_one_is_zero(self):
        assert logval_of_rat(Rat(1)).ln == 0

    def test_log_two(self):
        got = logval_of_rat(Rat(2)).ln
        with mpmath.workprec(300):
            want = mpmath.log(2)
        assert abs(got - want) < mpmath.mpf(2) ** -150

    def test_log_thirteen_against_independent_evaluation(self):
        got = logval_of_rat(Rat(13)).ln
        with mpmath.workprec(300):
            want = mpmath.log(13)
        assert abs(got - want) < mpmath.mpf(2) ** -150
        assert mpmath.nstr(got, 17) == "2.5649493574615367"

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            logval_of_rat(Rat(0))
        with pytest.raises(ValueError):
            logval_of_rat(Rat(-3, 7))

    def test_arithmetic_maps_to_values(self):
        tiny = mpmath.mpf(2) ** -120
        two = logval_of_rat(Rat(2))
        eight = logval_of_rat(Rat(8))
        assert abs((two * 3).ln - eight.ln) < tiny
        six = logval_of_rat(Rat(2)) + logval_of_rat(Rat(3))
        assert abs(six.ln - logval_of_rat(Rat(6)).ln) < tiny
        assert abs(logval_of_rat(Rat(9)).sub_const(2).ln - logval_of_rat(Rat(7)).ln) < tiny
        assert abs(two.add_value(logval_of_rat(Rat(3))).ln - logval_of_rat(Rat(5)).ln) < tiny
        assert abs((logval_of_rat(Rat(6)) - logval_of_rat(Rat(3))).ln - two.ln) < tiny

    def test_comparisons_and_margin(self):
        a = logval_of_rat(Rat(5))
        b = logval_of_rat(Rat(7))
        assert a < b and b > a and a <= b
        assert a.le_with_margin(a)
        assert not b.le_with_margin(a)

    def test_sub_const_rejects_nonpositive_result(self):
        with pytest.raises(ValueError):
            logval_of_rat(Rat(2)).sub_const(2)


def _reference_splitmix64(seed, count):
    # independent transcription of the published algorithm
    mask = (1 << 64) - 1
    state = seed & mask
    out = []
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & mask
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        out.append(z ^ (z >> 31))
    return out


class TestPrng:
    def test_seed_zero_reference_vector(self):
        p = Prng(0)
        got = [p.next_u64() for _ in range(3)]
        assert got == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
        assert got == _reference_splitmix64(0, 3)

    def test_matches_reference_for_other_seeds(self):
        for seed in (1, 42, 2**63 + 11, 2**64 - 1):
            p = Prng(seed)
            assert [p.next_u64() for _ in range(10)] == _reference_splitmix64(seed, 10)

    def test_first_draw_with_full_word_bound_is_raw_output(self):
        assert prng_uniform(Prng(0), 1 << 64) == _reference_splitmix64(0, 1)[0]

    def test_bound_one_returns_zero_without_consuming(self):
        p = Prng(7)
        assert p.uniform(1) == 0
        assert p.next_u64() == _reference_splitmix64(7, 1)[0]

    def test_equal_seeds_equal_streams(self):
        a, b = Prng(123), Prng(123)
        assert [a.uniform(1000) for _ in range(1000)] == [b.uniform(1000) for _ in range(1000)]

    def test_uniform_stays_in_range(self):
        p = Prng(5)
        for bound in (2, 3, 7, 100, 2**64, 2**100 + 7):
            for _ in range(50):
                assert 0 <= p.uniform(bound) < bound

    def test_uniform_rejects_bad_bound(self):
        with pytest.raises(ValueError):
            Prng(0).uniform(0)

    def test_large_bound_hits_high_words(self):
        p = Prng(9)
        draws = [p.uniform(2**100) for _ in range(200)]
        assert any(d >= 2**64 for d in draws)


def test_fraction_backend_reproduces_gmpy2_results():
    """The pure-stdlib rational lane must match the default lane bit for bit."""
    code = (
        "from latred import Basis, ReductionParams, reduce_basis, GenSpec, gen_unimodular\n"
        "from latred.numeric import Rat, RAT_BACKEND\n"
        "b = gen_unimodular(GenSpec(kind='uni', n=5, seed=3))\n"
        "r = reduce_basis(b, ReductionParams(algorithm='deep', delta=Rat(1)))\n"
        "print(RAT_BACKEND)\n"
        "print(r.trace.swap_count, r.trace.while_block_count)\n"
        "print(r.basis.vectors)\n"
    )
    outs = {}
    for backend in ("gmpy2", "fraction"):
        env = dict(os.environ, LATRED_RAT_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True
        )
        lines = proc.stdout.splitlines()
        assert lines[0] == backend
        outs[backend] = lines[1:]
    assert outs["gmpy2"] == outs["fraction"]

import time
from fractions import Fraction

import pytest

from latred import (
    ALGORITHMS,
    Basis,
    GenSpec,
    ReductionParams,
    check_reduced,
    check_same_lattice,
    compute_gso,
    deep_reduce,
    gen_svp_like,
    gen_unimodular,
    lll_reduce,
    pot,
    pot_reduce,
    pot_ratios,
    reduce_basis,
    s_values,
    s2_reduce,
    sigma_basis,
    ss,
)
from latred.numeric import Rat

from conftest import random_basis

DEEP_B = Basis(((0, 3, -2), (-3, -2, 0), (2, -2, -2)))
S2_B = Basis(((3, 1, -1), (1, -1, 2), (1, -2, -2)))

ONE = Rat(1)


def params(algo, delta=ONE, **kw):
    return ReductionParams(algorithm=algo, delta=delta, **kw)


class TestParams:
    def test_delta_ranges(self):
        with pytest.raises(ValueError):
            params("lll", Rat(5))
        with pytest.raises(ValueError):
            params("lll", Rat(1, 4))  # boundary excluded
        with pytest.raises(ValueError):
            params("deep", Rat(0))
        with pytest.raises(ValueError):
            params("s2", Rat(0))
        params("s2", Rat(1, 5))  # s2 accepts the low range the others reject
        with pytest.raises(ValueError):
            params("pot", Rat(1, 5))

    def test_window_only_for_deep(self):
        params("deep", window=5)
        with pytest.raises(ValueError):
            params("lll", window=5)
        with pytest.raises(ValueError):
            params("deep", window=0)

    def test_unknown_algorithm(self):
        with pytest.raises(ValueError):
            params("bkz")

    def test_delta_kept_exact(self):
        p = ReductionParams(algorithm="lll", delta="99/100")
        assert p.delta == Rat(99, 100)

    def test_wrapper_checks_algorithm(self):
        with pytest.raises(ValueError):
            lll_reduce(DEEP_B, params("deep"))


def _reference_lll_2d(basis: Basis, delta: Fraction):
    """Straightforward transcription of the adjacent-swap loop for n = 2.

    Independent of the production code path: plain Fractions, explicit
    Gram-Schmidt per block, floor(x + 1/2) rounding.
    """
    b = [list(v) for v in basis.vectors]

    def dot(u, v):
        return sum(Fraction(x) * y for x, y in zip(u, v))

    swaps = blocks = 0
    k = 2
    while k <= 2:
        blocks += 1
        # size-reduce row 2 against row 1
        b1_sq = dot(b[0], b[0])
        mu = dot(b[1], b[0]) / b1_sq
        c = (mu + Fraction(1, 2)).__floor__()
        if c:
            b[1] = [x - c * y for x, y in zip(b[1], b[0])]
            mu -= c
        bstar2_sq = dot(b[1], b[1]) - mu * mu * b1_sq
        if bstar2_sq >= (delta - mu * mu) * b1_sq:
            k += 1
        else:
            b[0], b[1] = b[1], b[0]
            swaps += 1
    return Basis((tuple(b[0]), tuple(b[1]))), swaps, blocks


class TestLll:
    def test_identity_no_swaps(self, identity3):
        res = lll_reduce(identity3, params("lll"))
        assert res.basis == identity3
        assert res.trace.swap_count == 0
        assert res.halted

    def test_hand_traced_2x2(self):
        res = lll_reduce(Basis(((4, 1), (1, 1))), params("lll"))
        assert res.trace.swap_count == 1
        assert res.basis.vectors == ((1, 1), (1, -2))

    def test_against_independent_2d_reference(self):
        for seed in range(30):
            basis = random_basis(seed + 900, 2, span=9)
            for delta in (Fraction(1), Fraction(99, 100), Fraction(3, 4)):
                want_basis, want_swaps, want_blocks = _reference_lll_2d(basis, delta)
                res = lll_reduce(basis, params("lll", Rat(delta)))
                assert res.basis == want_basis
                assert res.trace.swap_count == want_swaps
                assert res.trace.while_block_count == want_blocks

    def test_output_is_fixed_point(self):
        for seed in range(4):
            basis = random_basis(seed + 950, 5)
            p = params("lll")
            res = lll_reduce(basis, p)
            assert check_reduced(res.basis, p)


class TestDeep:
    def test_counterexample_trace(self):
        res = deep_reduce(DEEP_B, params("deep"))
        ev = res.trace.events
        assert ev[0].action == "incr" and ev[0].k_before == 2
        assert ev[1].action == "swap" and (ev[1].i, ev[1].k_before) == (1, 3)
        assert ev[1].pot_after == Rat(2_633_856)
        assert res.trace.initial_pot == Rat(2_496_676)

    def test_window_one_matches_lll_traces(self):
        for seed in range(10):
            basis = random_basis(seed + 1000, 5)
            for delta in (ONE, Rat(99, 100)):
                a = lll_reduce(basis, params("lll", delta))
                b = deep_reduce(basis, params("deep", delta, window=1))
                sig_a = [(e.k_before, e.action, e.i) for e in a.trace.events]
                sig_b = [(e.k_before, e.action, e.i) for e in b.trace.events]
                assert sig_a == sig_b
                assert a.basis == b.basis

    def test_windowed_gives_fixed_point_of_itself(self):
        basis = random_basis(77, 6)
        p = params("deep", window=2)
        res = deep_reduce(basis, p)
        assert res.halted
        assert check_reduced(res.basis, p)

    def test_full_norm_c_variant_runs(self):
        basis = random_basis(78, 6)
        p = params("deep", window=2, window_full_norm_c=True)
        res = deep_reduce(basis, p)
        assert res.halted
        assert check_same_lattice(basis, res.basis)


class TestPot:
    def test_identity(self, identity3):
        res = pot_reduce(identity3, params("pot"))
        assert res.trace.swap_count == 0

    def test_pot_integer_and_monotone(self):
        basis = gen_unimodular(GenSpec(kind="uni", n=8, seed=11))
        res = pot_reduce(basis, params("pot"))
        assert res.halted
        prev = res.trace.initial_pot
        assert prev.denominator == 1
        for ev in res.trace.swap_events():
            assert ev.pot_after.denominator == 1
            assert ev.pot_after < prev
            prev = ev.pot_after


class TestS2:
    def test_counterexample_trace(self):
        res = s2_reduce(S2_B, params("s2"))
        ev = res.trace.events
        assert ev[0].action == "incr"
        assert ev[1].action == "swap" and (ev[1].i, ev[1].k_before) == (1, 3)
        assert ev[1].pot_after == Rat(428_490)

    def test_ss_strictly_decreases_at_swaps(self):
        basis = random_basis(12, 6)
        res = s2_reduce(basis, params("s2"))
        prev = res.trace.initial_ss
        assert res.trace.swap_count > 0
        for ev in res.trace.swap_events():
            assert ev.ss_after < prev
            prev = ev.ss_after


class TestSwapDiagnostics:
    def test_s_values_worked_example(self):
        g = compute_gso(S2_B)
        assert s_values(g, 3) == [Rat(68, 495), Rat(-2, 45)]
        assert s_values(g, 2) == [Rat(0)]

    def test_s_values_orthogonal_all_zero(self):
        g = compute_gso(Basis(((2, 0, 0), (0, 3, 0), (0, 0, 5))))
        assert s_values(g, 3) == [Rat(0), Rat(0)]

    def test_pot_ratios_worked_example(self):
        g = compute_gso(DEEP_B)
        r = pot_ratios(g, 3)
        assert r[0] == Rat(2_633_856, 2_496_676)

    def test_pot_ratios_equal_norm_orthogonal(self):
        g = compute_gso(Basis(((2, 0, 0), (0, 2, 0), (0, 0, 2))))
        assert pot_ratios(g, 3) == [Rat(1), Rat(1)]

    def test_against_direct_recompute(self):
        for seed in range(20):
            basis = random_basis(seed + 2000, 4)
            g = compute_gso(basis)
            base_ss, base_pot = ss(g), pot(g)
            for k in range(2, 5):
                sv = s_values(g, k)
                rv = pot_ratios(g, k)
                for j in range(1, k):
                    g_sigma = compute_gso(sigma_basis(basis, j, k))
                    assert sv[j - 1] == base_ss - ss(g_sigma)
                    assert rv[j - 1] * base_pot == pot(g_sigma)


class TestCheckReduced:
    def test_counterexample_not_deep_reduced(self):
        assert not check_reduced(DEEP_B, params("deep"))

    def test_identity_reduced_for_all(self, identity3):
        for algo in ALGORITHMS:
            assert check_reduced(identity3, params(algo))

    def test_outputs_are_fixed_points(self):
        basis = random_basis(31, 5)
        for algo in ALGORITHMS:
            p = params(algo)
            res = reduce_basis(basis, p)
            assert check_reduced(res.basis, p)


class TestBudgets:
    def test_max_loops_reports_nonhalt(self):
        basis = gen_unimodular(GenSpec(kind="uni", n=5, seed=0))
        res = reduce_basis(basis, params("lll", max_loops=1))
        assert not res.halted
        assert res.trace.while_block_count == 1
        assert check_same_lattice(basis, res.basis)

    def test_deadline_reports_nonhalt(self):
        basis = gen_unimodular(GenSpec(kind="uni", n=8, seed=1))
        res = reduce_basis(basis, params("lll"), deadline=time.monotonic())
        assert not res.halted

    def test_trace_counters_consistent(self):
        basis = random_basis(55, 5)
        res = reduce_basis(basis, params("deep"))
        tr = res.trace
        assert tr.while_block_count == len(tr.events)
        assert tr.swap_count == sum(1 for e in tr.events if e.action == "swap")


class TestApproxMode:
    def test_agrees_with_exact_on_moderate_inputs(self):
        svp = gen_svp_like(GenSpec(kind="svp", n=8, seed=2))
        uni = gen_unimodular(GenSpec(kind="uni", n=8, seed=2))
        for basis in (svp, uni):
            for algo in ALGORITHMS:
                for delta in (ONE, Rat(99, 100)):
                    pe = params(algo, delta, record_trace=False)
                    pa = ReductionParams(
                        algorithm=algo, delta=delta, record_trace=False, mode="approx"
                    )
                    re_ = reduce_basis(basis, pe)
                    ra = reduce_basis(basis, pa)
                    assert ra.halted
                    assert ra.basis == re_.basis
                    assert ra.trace.swap_count == re_.trace.swap_count
                    assert check_same_lattice(basis, ra.basis)

    def test_insufficient_precision_is_loud(self):
        # 300-bit corner entry cannot survive a 53-bit GSO
        basis = gen_svp_like(GenSpec(kind="svp", n=4, seed=0, bits=300))
        with pytest.raises(ArithmeticError):
            reduce_basis(
                basis,
                ReductionParams(algorithm="lll", delta=ONE, mode="approx", precision=53),
            )

    def test_result_gso_is_exact(self):
        basis = gen_unimodular(GenSpec(kind="uni", n=6, seed=4))
        res = reduce_basis(
            basis, ReductionParams(algorithm="lll", delta=ONE, mode="approx", record_trace=False)
        )
        assert pot(res.gso).denominator == 1  # exact rational state of the output

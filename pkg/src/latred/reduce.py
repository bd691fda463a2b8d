"""The four reduction algorithms with a unified instrumented driver.

All four share one loop skeleton: size-reduce, evaluate a swap rule at the
working index k, then either advance k or move vector k to an earlier
position i and restart from max(i, 2).  They differ only in the swap rule:

  lll   - keep adjacent pair (k-1, k) if B_k >= (delta - mu_{k,k-1}^2) B_{k-1}
  deep  - scan i = i0..k-1 with the projected norm C of b_k; swap at the
          first i where C < delta * B_i (i0 = 1, or k-W with a window)
  pot   - swap to the position minimising the potential of the permuted
          basis, unless even the best is >= delta * current potential
  s2    - swap to the position maximising the squared-sum drop S_ik,
          unless even the best is <= (1-delta) * SS

Arithmetic runs in one of two modes: "exact" (integral GSO state, default,
bit-exact) or "approx" (big-float GSO coefficients over an exact integer
basis and Gram matrix, for large benchmarks; swap rules compare the
represented values directly with no extra tolerance).
"""

from __future__ import annotations

import contextlib
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .gso import Basis, GsoState, _ExactCore
from .numeric import Rat

LLL = "lll"
DEEP = "deep"
POT = "pot"
S2 = "s2"

ALGORITHMS = (LLL, DEEP, POT, S2)

DEFAULT_MAX_LOOPS = 1 << 24
DEFAULT_APPROX_PRECISION = 208


def _delta_range(algorithm) -> tuple:
    # swap rules degenerate outside these ranges
    if algorithm == S2:
        return (Fraction(0), Fraction(1))
    return (Fraction(1, 4), Fraction(1))


@dataclass(frozen=True)
class ReductionParams:
    """Algorithm selector plus the knobs shared by all reducers.

    delta is an exact rational, never a float: the delta = 1 boundary is
    precisely where the interesting behaviour lives and must not be
    perturbed by rounding.  window (deep only) restricts the insertion scan
    to i >= k - window.
    """

    algorithm: str
    delta: object = Rat(3, 4)
    window: int | None = None
    max_loops: int = DEFAULT_MAX_LOOPS
    record_trace: bool = True
    mode: str = "exact"
    precision: int = DEFAULT_APPROX_PRECISION
    window_full_norm_c: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        d = Rat(Fraction(self.delta) if isinstance(self.delta, (str, float)) else self.delta)
        object.__setattr__(self, "delta", d)
        lo, hi = _delta_range(self.algorithm)
        if not lo < d <= hi:
            raise ValueError(f"delta={d} out of range ({lo}, {hi}] for {self.algorithm}")
        if self.window is not None:
            if self.algorithm != DEEP:
                raise ValueError("window applies to the deep algorithm only")
            if self.window < 1:
                raise ValueError(f"window must be >= 1, got {self.window}")
        if self.mode not in ("exact", "approx"):
            raise ValueError(f"mode must be exact|approx, got {self.mode!r}")
        if self.max_loops < 1:
            raise ValueError("max_loops must be positive")


@dataclass(slots=True)
class TraceEvent:
    """One while block: either an index increment or a swap."""

    block: int
    k_before: int
    action: str  # "incr" | "swap"
    i: int | None = None  # insertion target (1-based) for swaps
    b_rho_before: object = None
    b_rho_after: object = None
    pot_after: object = None
    ss_after: object = None
    max_norm_sq: int = 0

    def describe(self) -> str:
        if self.action == "swap":
            return (
                f"block={self.block} k={self.k_before} action=SWAP({self.i},{self.k_before}) "
                f"b_rho_before={self.b_rho_before} b_rho_after={self.b_rho_after} "
                f"pot_after={self.pot_after} ss_after={self.ss_after}"
            )
        return f"block={self.block} k={self.k_before} action=incr"


@dataclass
class ReductionTrace:
    """Per-while-block event log plus run-level counters.

    Events are recorded only when the run was started with record_trace;
    the counters are always maintained.
    """

    n: int
    algorithm: str
    initial_max_norm_sq: int = 0
    initial_pot: object = None
    initial_ss: object = None
    events: list[TraceEvent] = field(default_factory=list)
    swap_count: int = 0
    while_block_count: int = 0
    recorded: bool = True

    def swap_events(self) -> list[TraceEvent]:
        return [e for e in self.events if e.action == "swap"]


@dataclass
class ReductionResult:
    basis: Basis
    gso: GsoState
    trace: ReductionTrace
    halted: bool


# ---------------------------------------------------------------------------
# Approximate (big-float) GSO core
# ---------------------------------------------------------------------------


class _ApproxCore:
    """Float GSO coefficients over an exact integer basis and Gram matrix.

    The basis and Gram matrix stay exact (all basis updates are integer row
    operations), so the output is always a true basis of the input lattice;
    only the mu/B values driving the swap decisions are floating-point.

    GSO rows are materialised lazily, each row being size-reduced as soon as
    it is computed.  Orthogonalising a raw skewed basis in one shot would
    demand precision proportional to its full dynamic range; against an
    already-reduced prefix the cancellation stays near log2 of the largest
    squared entry, which the default 208 bits covers for typical benchmark
    inputs.  When precision still runs out, positivity of some B_i is lost
    and an ArithmeticError asks for more bits or exact mode.
    """

    __slots__ = ("n", "vecs", "gram", "mu", "B", "known", "_to_f", "_floor")

    def __init__(self, basis: Basis, precision: int):
        try:
            import gmpy2

            self._to_f = lambda x, _c=gmpy2, _p=precision: _c.mpfr(x, _p)
            self._floor = lambda x, _c=gmpy2: int(_c.floor(x))
        except ImportError:  # pure fallback; the cloned context owns its precision
            import mpmath

            wp = mpmath.mp.clone()
            wp.prec = precision
            self._to_f = lambda x, _wp=wp: _wp.mpf(x)
            self._floor = lambda x, _wp=mpmath: int(_wp.floor(x))
        n = basis.n
        self.n = n
        self.vecs = [list(v) for v in basis.vectors]
        self.gram = [
            [sum(a * b for a, b in zip(self.vecs[i], self.vecs[j])) for j in range(n)]
            for i in range(n)
        ]
        self.mu = [[self._to_f(0)] * n for _ in range(n)]
        self.B = [self._to_f(0)] * n
        self.known = 0

    def to_basis(self) -> Basis:
        return Basis(tuple(tuple(v) for v in self.vecs))

    def _compute_row(self, i: int) -> None:
        gram, mu, B = self.gram, self.mu, self.B
        f = self._to_f
        mi = mu[i]
        for j in range(i):
            acc = f(gram[i][j])
            mj = mu[j]
            for t in range(j):
                acc -= mj[t] * mi[t] * B[t]
            mi[j] = acc / B[j]
        acc = f(gram[i][i])
        for t in range(i):
            acc -= mi[t] * mi[t] * B[t]
        if acc <= 0:
            raise ArithmeticError(
                f"big-float GSO lost positivity at vector {i + 1}; "
                "raise the precision or use exact mode"
            )
        B[i] = acc

    def _reduce_row(self, i: int) -> None:
        half = self._to_f(1) / 2
        mi = self.mu[i]
        for j in range(i - 1, -1, -1):
            c = self._floor(mi[j] + half)
            if c:
                self.row_op(i, j, c)

    def ensure_rows(self, count: int) -> None:
        """Materialise GSO rows 1..count, size-reducing each fresh row."""
        while self.known < count:
            i = self.known
            self._compute_row(i)
            self.known += 1
            self._reduce_row(i)

    def refresh_rows(self, start: int) -> None:
        for i in range(start, self.known):
            self._compute_row(i)

    def row_op(self, i: int, j: int, c: int) -> None:
        vi, vj = self.vecs[i], self.vecs[j]
        for t in range(self.n):
            vi[t] -= c * vj[t]
        gram = self.gram
        gi, gj = gram[i], gram[j]
        old_gij = gi[j]
        for t in range(self.n):
            if t != i:
                gi[t] -= c * gj[t]
        gi[i] += c * c * gj[j] - 2 * c * old_gij
        for t in range(self.n):
            if t != i:
                gram[t][i] = gi[t]
        mi, mj = self.mu[i], self.mu[j]
        cf = self._to_f(c)
        for t in range(j):
            mi[t] -= cf * mj[t]
        mi[j] -= cf

    def size_reduce_pass(self) -> bool:
        half = self._to_f(1) / 2
        changed = False
        for i in range(1, self.known):
            mi = self.mu[i]
            for j in range(i - 1, -1, -1):
                c = self._floor(mi[j] + half)
                if c:
                    self.row_op(i, j, c)
                    changed = True
        return changed

    def insert(self, i: int, k: int) -> None:
        self.vecs.insert(i, self.vecs.pop(k))
        gram = self.gram
        gram.insert(i, gram.pop(k))
        for row in gram:
            row.insert(i, row.pop(k))
        self.refresh_rows(i)

    # -- value interface shared with _ExactCore (1-based) ----------------

    def convert_rat(self, x):
        return self._to_f(x.numerator) / self._to_f(x.denominator)

    def zero(self):
        return self._to_f(0)

    def one(self):
        return self._to_f(1)

    def bnorm(self, i: int):
        return self.B[i - 1]

    def norm_sq(self, i: int) -> int:
        return self.gram[i - 1][i - 1]

    def max_norm_sq(self) -> int:
        return max(self.gram[t][t] for t in range(self.n))

    def mu2b(self, k: int, j: int):
        m = self.mu[k - 1][j - 1]
        return m * m * self.B[j - 1]

    def lovasz_ok(self, k: int, delta_c) -> bool:
        m = self.mu[k - 1][k - 2]
        return self.B[k - 1] >= (delta_c - m * m) * self.B[k - 2]

    def pot_val(self):
        self.ensure_rows(self.n)
        p = self.one()
        acc = self.one()
        for i in range(self.n):
            acc = acc * self.B[i]
            p = p * acc
        return p

    def ss_val(self):
        self.ensure_rows(self.n)
        s = self.zero()
        for b in self.B:
            s = s + b
        return s


# exact-core adapters for the shared driver interface


def _exact_ensure_rows(self, count):
    pass  # the integral state always carries every row


def _exact_convert_rat(self, x):
    return Rat(x)


def _exact_zero(self):
    return Rat(0)


def _exact_one(self):
    return Rat(1)


def _exact_lovasz_ok(self, k, delta_c):
    # B_k >= (delta - mu^2) B_{k-1}, cleared of denominators:
    # q d_k d_{k-2} + q lam^2 >= p d_{k-1}^2 with delta = p/q
    d = self.d
    lam = self.lam[k - 1][k - 2]
    p, q = delta_c.numerator, delta_c.denominator
    return q * (d[k] * d[k - 2] + lam * lam) >= p * d[k - 1] * d[k - 1]


def _exact_pot_val(self):
    return Rat(self.pot_int())


_ExactCore.ensure_rows = _exact_ensure_rows
_ExactCore.convert_rat = _exact_convert_rat
_ExactCore.zero = _exact_zero
_ExactCore.one = _exact_one
_ExactCore.lovasz_ok = _exact_lovasz_ok
_ExactCore.pot_val = _exact_pot_val
_ExactCore.ss_val = _ExactCore.ss_rat


# ---------------------------------------------------------------------------
# Swap rules (return the insertion position i, or None to advance k)
# ---------------------------------------------------------------------------


def _decide_lll(core, k: int, delta_c, params) -> int | None:
    return None if core.lovasz_ok(k, delta_c) else k - 1


def _decide_deep(core, k: int, delta_c, params) -> int | None:
    w = params.window
    i0 = 1 if w is None else max(1, k - w)
    c_val = core.one() * core.norm_sq(k)
    if not params.window_full_norm_c:
        # start C at the squared norm of b_k projected past b_1..b_{i0-1};
        # then C equals that projected norm at every stage i, which is what
        # keeps B_rho strictly shrinking at windowed swaps as well
        for j in range(1, i0):
            c_val = c_val - core.mu2b(k, j)
    for i in range(i0, k):
        if c_val >= delta_c * core.bnorm(i):
            c_val = c_val - core.mu2b(k, i)
        else:
            return i
    return None


def _decide_pot(core, k: int, delta_c, params) -> int | None:
    # r = Pot(sigma_{j,k} B) / Pot(B) = prod_{l=j}^{k-1} D_l / B_l, built
    # backwards; strict '<' while j descends keeps the largest index among ties
    d_val = core.bnorm(k)
    r = core.one()
    best_r = None
    best_i = 0
    for j in range(k - 1, 0, -1):
        d_val = d_val + core.mu2b(k, j)
        r = r * d_val / core.bnorm(j)
        if best_r is None or r < best_r:
            best_r, best_i = r, j
    if delta_c <= best_r:
        return None
    return best_i


def _decide_s2(core, k: int, delta_c, params) -> int | None:
    # S_jk = sum_{l=j}^{k-1} mu_kl^2 B_l (B_l/D_l - 1), built backwards;
    # strict '>' while j descends keeps the largest index among ties
    one = core.one()
    # at delta = 1 the threshold is exactly zero and the full squared sum
    # (which would force every GSO row to exist) is never needed
    threshold = core.zero() if delta_c == one else (one - delta_c) * core.ss_val()
    d_val = core.bnorm(k)
    s = core.zero()
    best_s = None
    best_i = 0
    for j in range(k - 1, 0, -1):
        m2b = core.mu2b(k, j)
        d_val = d_val + m2b
        s = s + m2b * (core.bnorm(j) / d_val - one)
        if best_s is None or s > best_s:
            best_s, best_i = s, j
    if best_s <= threshold:
        return None
    return best_i


_DECIDERS = {LLL: _decide_lll, DEEP: _decide_deep, POT: _decide_pot, S2: _decide_s2}


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------


def _make_core(basis: Basis, params: ReductionParams):
    if params.mode == "exact":
        return _ExactCore.from_basis(basis)
    return _ApproxCore(basis, params.precision)


def _arith_context(params: ReductionParams):
    """Precision context for approx mode (gmpy2 mpfr ops follow the thread context)."""
    if params.mode != "approx":
        return contextlib.nullcontext()
    try:
        import gmpy2

        return gmpy2.context(precision=params.precision)
    except ImportError:
        return contextlib.nullcontext()  # mpmath clone carries its own precision


def reduce_basis(basis: Basis, params: ReductionParams, deadline: float | None = None) -> ReductionResult:
    """Run the selected reduction until its fixed point, a loop cap, or a deadline.

    Returns halted=False (never raises) if max_loops while blocks were
    executed or `deadline` (a time.monotonic value) passed before the
    algorithm finished; the partial basis and trace are still returned.
    """
    with _arith_context(params):
        return _reduce_inner(basis, params, deadline)


def _reduce_inner(basis: Basis, params: ReductionParams, deadline: float | None) -> ReductionResult:
    core = _make_core(basis, params)
    n = core.n
    decide = _DECIDERS[params.algorithm]
    delta_c = core.convert_rat(params.delta)
    record = params.record_trace
    # the s2 rule at delta < 1 compares against the full squared sum, so
    # every GSO row must exist; all other rules only look at rows <= k
    need_all_rows = params.algorithm == S2 and params.delta != 1
    trace = ReductionTrace(
        n=n,
        algorithm=params.algorithm,
        initial_max_norm_sq=core.max_norm_sq(),
        initial_pot=core.pot_val() if record else None,
        initial_ss=core.ss_val() if record else None,
        recorded=record,
    )
    events = trace.events
    halted = True
    k = 2
    while k <= n:
        if trace.while_block_count >= params.max_loops:
            halted = False
            break
        if deadline is not None and time.monotonic() >= deadline:
            halted = False
            break
        trace.while_block_count += 1
        core.ensure_rows(n if need_all_rows else k)
        core.size_reduce_pass()
        i = decide(core, k, delta_c, params)
        if i is None:
            if record:
                events.append(
                    TraceEvent(
                        block=trace.while_block_count,
                        k_before=k,
                        action="incr",
                        max_norm_sq=core.max_norm_sq(),
                    )
                )
            k += 1
        else:
            b_before = core.bnorm(i)
            core.insert(i - 1, k - 1)
            trace.swap_count += 1
            if record:
                events.append(
                    TraceEvent(
                        block=trace.while_block_count,
                        k_before=k,
                        action="swap",
                        i=i,
                        b_rho_before=b_before,
                        b_rho_after=core.bnorm(i),
                        pot_after=core.pot_val(),
                        ss_after=core.ss_val(),
                        max_norm_sq=core.max_norm_sq(),
                    )
                )
            k = max(i, 2)
    out_basis = core.to_basis()
    if isinstance(core, _ExactCore):
        gso = GsoState(core)
    else:
        gso = GsoState(_ExactCore.from_basis(out_basis))
    return ReductionResult(basis=out_basis, gso=gso, trace=trace, halted=halted)


def _require(params: ReductionParams, algorithm: str) -> ReductionParams:
    if params.algorithm != algorithm:
        raise ValueError(f"params.algorithm is {params.algorithm!r}, expected {algorithm!r}")
    return params


def lll_reduce(basis: Basis, params: ReductionParams, deadline=None) -> ReductionResult:
    """Classic reduction: adjacent swaps under the Lovasz condition."""
    return reduce_basis(basis, _require(params, LLL), deadline)


def deep_reduce(basis: Basis, params: ReductionParams, deadline=None) -> ReductionResult:
    """Deep-insertion reduction, optionally windowed to i >= k - window."""
    return reduce_basis(basis, _require(params, DEEP), deadline)


def pot_reduce(basis: Basis, params: ReductionParams, deadline=None) -> ReductionResult:
    """Greedy potential-minimising deep insertion."""
    return reduce_basis(basis, _require(params, POT), deadline)


def s2_reduce(basis: Basis, params: ReductionParams, deadline=None) -> ReductionResult:
    """Greedy squared-sum-minimising deep insertion."""
    return reduce_basis(basis, _require(params, S2), deadline)


def check_reduced(basis: Basis, params: ReductionParams) -> bool:
    """True iff one pass of the algorithm's loop over k = 2..n triggers no swap.

    This is the operational fixed-point notion of "reduced": the output of a
    completed run always satisfies it for the parameters of that run.
    """
    with _arith_context(params):
        core = _make_core(basis, params)
        decide = _DECIDERS[params.algorithm]
        delta_c = core.convert_rat(params.delta)
        need_all_rows = params.algorithm == S2 and params.delta != 1
        for k in range(2, core.n + 1):
            core.ensure_rows(core.n if need_all_rows else k)
            core.size_reduce_pass()
            if decide(core, k, delta_c, params) is not None:
                return False
        return True


# ---------------------------------------------------------------------------
# Per-index swap diagnostics on exact GSO states
# ---------------------------------------------------------------------------


def s_values(gso: GsoState, k: int) -> list:
    """[S_1k, ..., S_{k-1,k}]: exact squared-sum drop of each insertion of b_k.

    S_jk equals ss(B) - ss(basis after moving k before j); computed from the
    projected-norm recursion rather than by re-orthogonalising.
    """
    if not 2 <= k <= gso.n:
        raise ValueError(f"index k={k} out of range 2..{gso.n}")
    core = gso._core
    d_val = core.bnorm(k)
    s = Rat(0)
    out = [None] * (k - 1)
    for j in range(k - 1, 0, -1):
        m2b = core.mu2b(k, j)
        d_val = d_val + m2b
        s = s + m2b * (core.bnorm(j) / d_val - 1)
        out[j - 1] = s
    return out


def pot_ratios(gso: GsoState, k: int) -> list:
    """[R_1, ..., R_{k-1}] with R_j = pot(after moving k before j) / pot(B), exact.

    The argmin over R_j coincides with the argmin over the permuted
    potentials because the current potential is positive.
    """
    if not 2 <= k <= gso.n:
        raise ValueError(f"index k={k} out of range 2..{gso.n}")
    core = gso._core
    d_val = core.bnorm(k)
    r = Rat(1)
    out = [None] * (k - 1)
    for j in range(k - 1, 0, -1):
        d_val = d_val + core.mu2b(k, j)
        r = r * d_val / core.bnorm(j)
        out[j - 1] = r
    return out


__all__ = [
    "ALGORITHMS",
    "DEEP",
    "LLL",
    "POT",
    "S2",
    "DEFAULT_MAX_LOOPS",
    "ReductionParams",
    "ReductionResult",
    "ReductionTrace",
    "TraceEvent",
    "check_reduced",
    "deep_reduce",
    "lll_reduce",
    "pot_reduce",
    "pot_ratios",
    "reduce_basis",
    "s_values",
    "s2_reduce",
]

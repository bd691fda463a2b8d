"""Exact-arithmetic lattice basis reduction toolkit.

Four reduction algorithms (classic adjacent-swap, deep insertion with an
optional window, potential-greedy, squared-sum-greedy) over exact rational
Gram-Schmidt data, valid for the full parameter range including delta = 1;
plus lattice point-count and while-block bounds, seeded input generators,
golden counterexample checks, and a benchmark CLI.
"""

from .bounds import (
    BoundReport,
    EnumerationTooLargeError,
    PointCountBound,
    alpha_of,
    enumerate_points,
    loop_bound,
    point_count_bound,
    w_recursion_holds,
    w_sequence,
)
from .conformance import (
    CounterexampleReport,
    audit_trace,
    check_same_lattice,
    exact_det,
    reproduce_deep_counterexample,
    reproduce_s2_counterexample,
)
from .gso import (
    Basis,
    GsoState,
    InsertionMove,
    RankDeficientError,
    apply_insertion,
    compute_gso,
    pot,
    projected_norms,
    sigma_basis,
    size_reduce,
    ss,
    volume_sq,
)
from .latgen import (
    BasisParseError,
    GenSpec,
    gen_svp_like,
    gen_unimodular,
    generate,
    read_basis,
    write_basis,
)
from .numeric import LogVal, Prng, Rat, logval_of_rat, parse_rat, prng_uniform, rat, round_nearest
from .reduce import (
    ALGORITHMS,
    DEEP,
    LLL,
    POT,
    S2,
    ReductionParams,
    ReductionResult,
    ReductionTrace,
    TraceEvent,
    check_reduced,
    deep_reduce,
    lll_reduce,
    pot_reduce,
    pot_ratios,
    reduce_basis,
    s_values,
    s2_reduce,
)

__version__ = "0.1.0"

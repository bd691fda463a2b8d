"""Lattice point-count bounds and while-block bounds, in log space.

The loop bounds grow like exp(Theta(n^2 log n)), so every bound value is a
LogVal (natural log carried in a high-precision float).  The point-count
side also has an exact-rational fast path for radii whose square roots come
out rational, plus a brute-force enumerator that serves as the independent
oracle for the bound inequalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .gso import Basis, GsoState, compute_gso
from .numeric import LOG_PRECISION, LogVal, Rat


class EnumerationTooLargeError(RuntimeError):
    """Estimated enumeration tree exceeds the configured node cap."""


@dataclass(frozen=True)
class PointCountBound:
    """Both upper bounds on the number of lattice points of norm <= r.

    product_log:   log of prod_i (2r/|b*_i| + 1)
    product_exact: the same product as an exact rational when every factor
                   is rational (e.g. r = 0, or orthogonal power-of-square
                   cases); None otherwise
    closed_form_log: log of (M + 2r)^n / vol(L)
    """

    product_log: LogVal
    product_exact: object | None
    closed_form_log: LogVal


def _sqrt_rat_exact(x) -> object | None:
    """sqrt(x) as an exact rational if x is a perfect rational square."""
    num, den = x.numerator, x.denominator
    if num < 0:
        return None
    rn = math.isqrt(num)
    rd = math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Rat(rn, rd)
    return None


def alpha_of(basis: Basis) -> LogVal:
    """log of M^n / vol(L), where M is the largest input vector norm.

    Always >= 0 by Hadamard's inequality; this is the scale parameter of
    every loop bound below.
    """
    gso = compute_gso(basis)
    n = basis.n
    max_sq = basis.max_norm_sq()
    vol_sq = gso._core.vol_sq()
    return LogVal.of_sqrt_rat(Rat(max_sq)) * n - LogVal.of_sqrt_rat(Rat(vol_sq))


def point_count_bound(gso: GsoState, r_sq) -> PointCountBound:
    """Both bounds on #{x in L : |x|^2 <= r_sq} for a nonnegative rational r_sq."""
    r_sq = Rat(r_sq)
    if r_sq < 0:
        raise ValueError("r_sq must be >= 0")
    n = gso.n
    core = gso._core
    exact: object | None = Rat(1)
    with mpmath.workprec(LOG_PRECISION):
        log_prod = mpmath.mpf(0)
        for i in range(1, n + 1):
            ratio = r_sq / core.bnorm(i)  # (r / |b*_i|)^2
            factor_log = mpmath.log(2 * mpmath.sqrt(_to_mpf(ratio)) + 1)
            log_prod += factor_log
            if exact is not None:
                root = _sqrt_rat_exact(ratio)
                exact = None if root is None else exact * (2 * root + 1)
        m = mpmath.sqrt(_to_mpf(Rat(core.max_norm_sq())))
        two_r = 2 * mpmath.sqrt(_to_mpf(r_sq))
        closed = n * mpmath.log(m + two_r) - mpmath.log(_to_mpf(Rat(core.vol_sq()))) / 2
    return PointCountBound(
        product_log=LogVal(log_prod),
        product_exact=exact,
        closed_form_log=LogVal(closed),
    )


def _to_mpf(x):
    return mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator)


def enumerate_points(basis: Basis, r_sq, node_cap: int = 2_000_000) -> int:
    """Exact count of lattice points with squared norm <= r_sq (origin included).

    Depth-first coefficient enumeration: coordinates are fixed from v_n down
    to v_1, and at each level v_j ranges over the integers allowed by the
    projected-norm budget.  All pruning tests are exact rational
    comparisons, so the count is exact.  Intended as an oracle for small
    dimensions; raises EnumerationTooLargeError when the product bound
    estimates more than node_cap nodes.
    """
    r_sq = Rat(r_sq)
    if r_sq < 0:
        raise ValueError("r_sq must be >= 0")
    gso = compute_gso(basis)
    n = basis.n
    core = gso._core
    est = 1.0
    for i in range(1, n + 1):
        est *= 2 * math.sqrt(float(_to_mpf(r_sq / core.bnorm(i)))) + 1
        if est > node_cap:
            raise EnumerationTooLargeError(
                f"estimated enumeration size {est:.3g} exceeds node cap {node_cap}"
            )
    mu = gso.mu
    bnorms = gso.bnorms

    def level_range(center, budget, b):
        """Inclusive integer window certain to contain {v : b*(v+center)^2 <= budget}.

        Float guess widened by 2, then expanded outward with exact tests; the
        caller re-tests each candidate exactly, so the window only has to be
        a superset.
        """
        s = math.sqrt(max(float(_to_mpf(budget / b)), 0.0))
        c = -float(_to_mpf(center))
        lo = math.ceil(c - s) - 2
        hi = math.floor(c + s) + 2

        def ok(v):
            t = center + v
            return b * t * t <= budget

        while ok(lo):
            lo -= 1
        while ok(hi):
            hi += 1
        return lo + 1, hi - 1

    count = 0
    # gammas[j] = sum over already-fixed i > j of v_i * mu_ij
    gammas = [Rat(0)] * n
    v = [0] * n

    def walk(j: int, used) -> None:
        nonlocal count
        budget = r_sq - used
        b = bnorms[j]
        lo, hi = level_range(gammas[j], budget, b)
        for vj in range(lo, hi + 1):
            t = gammas[j] + vj
            term = b * t * t
            if term > budget:
                continue
            if j == 0:
                count += 1
                continue
            v[j] = vj
            saved = [gammas[t2] for t2 in range(j)]
            if vj:
                mu_row = mu[j]
                for t2 in range(j):
                    gammas[t2] = saved[t2] + vj * mu_row[t2]
            walk(j - 1, used + term)
            for t2 in range(j):
                gammas[t2] = saved[t2]

    walk(n - 1, Rat(0))
    return count


@dataclass(frozen=True)
class BoundReport:
    """While-block bound data for dimension n and scale alpha, all in log space.

    log_w lists the per-position budgets w_1..w_{n-1}; log_bound_product is
    the main (n-1) * (3 prod (2+sqrt(j+3)))^n alpha^(n-1) bound, and
    log_bound_factorial the weaker closed form with the (n+2)! term.  The
    product form never exceeds the factorial form.
    """

    n: int
    log_alpha: LogVal
    log_w: tuple
    log_bound_product: LogVal
    log_bound_factorial: LogVal


def w_sequence(n: int, log_alpha: LogVal) -> list[LogVal]:
    """Logs of the per-position budgets w_1..w_{n-1}.

    w_1 = 3^n alpha - 2 and, for k >= 2,
    w_k = (3 (1+sqrt(k+3)) prod_{j=2}^{k-1} (2+sqrt(j+3)))^n alpha^k - 2.
    These satisfy the recursion w_k >= ((1+sqrt(k+3))^n alpha - 2)(1 + sum_{j<k} w_j).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if log_alpha.ln < 0:
        raise ValueError("alpha must be >= 1")
    out = []
    with mpmath.workprec(LOG_PRECISION):
        ln3 = mpmath.log(3)
        prefix = mpmath.mpf(0)  # sum of log(2+sqrt(j+3)) for j = 2..k-1
        for k in range(1, n):
            if k == 1:
                main = n * ln3 + log_alpha.ln
            else:
                main = n * (ln3 + mpmath.log(1 + mpmath.sqrt(k + 3)) + prefix) + k * log_alpha.ln
                # fold the factor for j = k into the prefix for the next k
            out.append(LogVal(main).sub_const(2))
            prefix += mpmath.log(2 + mpmath.sqrt(k + 3)) if k >= 2 else 0
    return out


def loop_bound(n: int, log_alpha: LogVal) -> BoundReport:
    """Both closed-form while-block bounds for dimension n and scale alpha."""
    if n < 2:
        raise ValueError("n must be >= 2")
    log_w = tuple(w_sequence(n, log_alpha))
    with mpmath.workprec(LOG_PRECISION):
        prod = mpmath.log(3)
        for j in range(2, n):
            prod += mpmath.log(2 + mpmath.sqrt(j + 3))
        log_product = mpmath.log(n - 1) + n * prod + (n - 1) * log_alpha.ln
        phi = 2 / mpmath.sqrt(5) + 1
        log_factorial = (
            mpmath.log(n - 1)
            + n * (n - 2) * mpmath.log(phi)
            + (n - 1) * log_alpha.ln
            + mpmath.mpf(n) / 2 * mpmath.log(3 * mpmath.factorial(n + 2) / 8)
        )
    return BoundReport(
        n=n,
        log_alpha=log_alpha,
        log_w=log_w,
        log_bound_product=LogVal(log_product),
        log_bound_factorial=LogVal(log_factorial),
    )


def w_recursion_holds(n: int, log_alpha: LogVal) -> bool:
    """Numerically verify w_k >= ((1+sqrt(k+3))^n alpha - 2)(1 + sum_{j<k} w_j)."""
    with mpmath.workprec(LOG_PRECISION):
        alpha = mpmath.exp(log_alpha.ln)
        ws = [mpmath.exp(lv.ln) for lv in w_sequence(n, log_alpha)]
        acc = mpmath.mpf(1)
        for k in range(1, n):
            need = ((1 + mpmath.sqrt(k + 3)) ** n * alpha - 2) * acc
            if ws[k - 1] < need:
                return False
            acc += ws[k - 1]
    return True


__all__ = [
    "BoundReport",
    "EnumerationTooLargeError",
    "PointCountBound",
    "alpha_of",
    "enumerate_points",
    "loop_bound",
    "point_count_bound",
    "w_recursion_holds",
    "w_sequence",
]

"""Golden fixed-value checks and structural verifiers.

Two three-dimensional bases are reproduced here for which a single deep
insertion RAISES the basis potential even though the reduction as a whole
makes progress; they pin down, with exact integers and rationals, that the
potential is not a monotone quantity for the deep-insertion and
squared-sum algorithms.  Every comparison in this module is exact; there
are no tolerances anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .gso import Basis, InsertionMove, apply_insertion, compute_gso, pot, sigma_basis, ss
from .numeric import Rat
from .reduce import DEEP, S2, ReductionParams, ReductionTrace, deep_reduce, s2_reduce, s_values

# columns of the two worked bases (each inner tuple is one basis vector)
DEEP_CASE_VECTORS = ((0, 3, -2), (-3, -2, 0), (2, -2, -2))
S2_CASE_VECTORS = ((3, 1, -1), (1, -1, 2), (1, -2, -2))


# ---------------------------------------------------------------------------
# Exact linear algebra helpers (fraction-free)
# ---------------------------------------------------------------------------


def _bareiss_echelon(rows: list[list[int]], width: int) -> tuple[int, int]:
    """In-place fraction-free elimination of an n x width integer matrix.

    Returns (sign, det) for the leading n x n block; intermediate entries
    stay polynomially sized (they are minors of the input).  det == 0 means
    the leading block is singular; the echelon content is then unspecified.
    """
    n = len(rows)
    sign = 1
    prev = 1
    for c in range(n):
        pivot_row = None
        for r in range(c, n):
            if rows[r][c] != 0:
                pivot_row = r
                break
        if pivot_row is None:
            return sign, 0
        if pivot_row != c:
            rows[c], rows[pivot_row] = rows[pivot_row], rows[c]
            sign = -sign
        p = rows[c][c]
        for r in range(c + 1, n):
            factor = rows[r][c]
            row_r, row_c = rows[r], rows[c]
            for t in range(c + 1, width):
                row_r[t] = (p * row_r[t] - factor * row_c[t]) // prev
            row_r[c] = 0
        prev = p
    return sign, rows[n - 1][n - 1]


def exact_det(matrix) -> int:
    """Exact determinant of a square integer matrix."""
    rows = [list(r) for r in matrix]
    sign, det = _bareiss_echelon(rows, len(rows))
    return sign * det


def basis_matrix(basis: Basis) -> list[list[int]]:
    """Matrix whose column j is basis vector j (the conventional layout)."""
    n = basis.n
    return [[basis.vectors[j][i] for j in range(n)] for i in range(n)]


def check_same_lattice(basis_in: Basis, basis_out: Basis) -> bool:
    """True iff the two bases generate the same lattice.

    Equivalent to: U = B_in^-1 * B_out has integer entries and det U = +-1.
    Solved by fraction-free elimination of the augmented system followed by
    exact rational back-substitution.
    """
    if basis_in.n != basis_out.n:
        return False
    n = basis_in.n
    a = basis_matrix(basis_in)
    b = basis_matrix(basis_out)
    rows = [a[i] + b[i] for i in range(n)]
    _, det_in = _bareiss_echelon(rows, 2 * n)
    if det_in == 0:
        return False
    det_out = exact_det(b)
    if abs(det_out) != abs(det_in):
        return False
    # back-substitute the triangularised system; U integral <=> same lattice
    for col in range(n):
        xs = [Fraction(0)] * n
        for r in range(n - 1, -1, -1):
            acc = Fraction(rows[r][n + col])
            for t in range(r + 1, n):
                acc -= rows[r][t] * xs[t]
            if rows[r][r] == 0:
                return False
            acc /= rows[r][r]
            if acc.denominator != 1:
                return False
            xs[r] = acc
    return True


# ---------------------------------------------------------------------------
# Counterexample reports
# ---------------------------------------------------------------------------


def _fmt_value(value) -> str:
    if isinstance(value, (tuple, list)):
        return "(" + ", ".join(_fmt_value(v) for v in value) + ")"
    return str(value)


@dataclass
class CounterexampleReport:
    """Named exact values checked against their frozen expected constants."""

    case: str
    checks: list[tuple[str, str, str, bool]] = field(default_factory=list)

    def add(self, name: str, got, expected) -> None:
        ok = got == expected
        self.checks.append((name, _fmt_value(got), _fmt_value(expected), ok))

    @property
    def passed(self) -> bool:
        return all(ok for *_, ok in self.checks)

    def lines(self) -> list[str]:
        return [
            f"{name} = {got} (expected {expected}) {'OK' if ok else 'FAIL'}"
            for name, got, expected, ok in self.checks
        ]

    def __str__(self) -> str:
        return "\n".join(self.lines())


def _first_actions(trace: ReductionTrace, count: int) -> list[str]:
    out = []
    for ev in trace.events[:count]:
        if ev.action == "swap":
            out.append(f"SWAP({ev.i},{ev.k_before})")
        else:
            out.append(f"incr(k={ev.k_before})")
    return out


def reproduce_deep_counterexample() -> CounterexampleReport:
    """Potential rises across the first swap of the deep-insertion run at delta = 1."""
    report = CounterexampleReport(case="deep-pot-increase")
    basis = Basis(DEEP_CASE_VECTORS)
    gso = compute_gso(basis)

    report.add("Pot(B)", pot(gso), Rat(2_496_676))
    stars = gso.gso_vectors
    report.add("b*_2", stars[1], (Rat(-3), Rat(-8, 13), Rat(-12, 13)))
    report.add("b*_3", stars[2], (Rat(8, 7), Rat(-12, 7), Rat(-18, 7)))
    report.add("B_norms", gso.bnorms, (Rat(13), Rat(133, 13), Rat(76, 7)))

    _, sigma_gso = apply_insertion(basis, gso, InsertionMove(1, 3))
    pot_after = pot(sigma_gso)
    report.add("Pot(sigma_13(B))", pot_after, Rat(2_633_856))
    report.add("Pot increased", pot_after > pot(gso), True)
    report.add("b*_2 after sigma_13", sigma_gso.gso_vectors[1], (Rat(1, 3), Rat(8, 3), Rat(-7, 3)))

    result = deep_reduce(basis, ReductionParams(algorithm=DEEP, delta=Rat(1)))
    report.add("first two blocks", _first_actions(result.trace, 2), ["incr(k=2)", "SWAP(1,3)"])
    report.add(
        "Pot after block 2",
        result.trace.events[1].pot_after if len(result.trace.events) > 1 else None,
        Rat(2_633_856),
    )
    return report


def reproduce_s2_counterexample() -> CounterexampleReport:
    """Potential rises across the first swap of the squared-sum run at delta = 1."""
    report = CounterexampleReport(case="s2-pot-increase")
    basis = Basis(S2_CASE_VECTORS)
    gso = compute_gso(basis)

    report.add("Pot(B)", pot(gso), Rat(384_054))
    report.add("SS(B)", ss(gso), Rat(1651, 66))
    report.add("S_12", s_values(gso, 2)[0], Rat(0))

    sv = s_values(gso, 3)
    report.add("S_13", sv[0], Rat(68, 495))
    report.add("S_13 > S_23", sv[0] > sv[1], True)
    report.add("SS(sigma_13(B))", ss(compute_gso(sigma_basis(basis, 1, 3))), Rat(2239, 90))
    report.add("SS(sigma_23(B))", ss(compute_gso(sigma_basis(basis, 2, 3))), Rat(24809, 990))

    _, sigma_gso = apply_insertion(basis, gso, InsertionMove(1, 3))
    pot_after = pot(sigma_gso)
    report.add("Pot(sigma_13(B))", pot_after, Rat(428_490))
    report.add("Pot increased", pot_after > pot(gso), True)

    result = s2_reduce(basis, ReductionParams(algorithm=S2, delta=Rat(1)))
    report.add("first two blocks", _first_actions(result.trace, 2), ["incr(k=2)", "SWAP(1,3)"])
    return report


# ---------------------------------------------------------------------------
# Trace audits
# ---------------------------------------------------------------------------


def audit_trace(trace: ReductionTrace, params: ReductionParams) -> list[str]:
    """Structural violations found in a recorded trace; empty means clean.

    Checks, for every while block of the run:
      (a) the displaced B value strictly decreased at every swap,
      (b) the largest vector norm never exceeded its initial value,
      (c) the algorithm's own monotone quantity really was monotone
          (potential for lll/pot, squared sum for s2; deep has none),
      (d) the index trajectory followed the update rule k -> k+1 on advance,
          k -> max(i, 2) on a swap, starting from k = 2.
    """
    violations = []
    if not trace.recorded:
        return ["trace was not recorded (record_trace=False); nothing to audit"]
    expect_k = 2
    prev_pot = trace.initial_pot
    prev_ss = trace.initial_ss
    check_pot = params.algorithm in ("lll", "pot")
    check_ss = params.algorithm == "s2"
    for ev in trace.events:
        if ev.k_before != expect_k:
            violations.append(
                f"block {ev.block}: index is {ev.k_before}, update rule expected {expect_k}"
            )
            expect_k = ev.k_before
        if ev.max_norm_sq > trace.initial_max_norm_sq:
            violations.append(
                f"block {ev.block}: max squared norm {ev.max_norm_sq} exceeds "
                f"initial {trace.initial_max_norm_sq}"
            )
        if ev.action == "swap":
            if not (ev.b_rho_after < ev.b_rho_before):
                violations.append(
                    f"block {ev.block}: B_rho did not decrease "
                    f"({ev.b_rho_before} -> {ev.b_rho_after})"
                )
            if check_pot and not (ev.pot_after < prev_pot):
                violations.append(
                    f"block {ev.block}: potential did not decrease at swap "
                    f"({prev_pot} -> {ev.pot_after})"
                )
            if check_ss and not (ev.ss_after < prev_ss):
                violations.append(
                    f"block {ev.block}: squared sum did not decrease at swap "
                    f"({prev_ss} -> {ev.ss_after})"
                )
            prev_pot = ev.pot_after
            prev_ss = ev.ss_after
            expect_k = max(ev.i, 2)
        else:
            expect_k = ev.k_before + 1
    return violations


__all__ = [
    "CounterexampleReport",
    "DEEP_CASE_VECTORS",
    "S2_CASE_VECTORS",
    "audit_trace",
    "basis_matrix",
    "check_same_lattice",
    "exact_det",
    "reproduce_deep_counterexample",
    "reproduce_s2_counterexample",
]

"""Bases, exact Gram-Schmidt data, size-reduction, and insertion moves.

The exact state is kept in integral form: alongside the integer basis and
its Gram matrix we store the principal Gram determinants d_1..d_n (d_0 = 1)
and the integers lam[i][j] = mu_ij * d_j.  Every derived quantity
(mu_ij = lam_ij / d_j, B_i = d_i / d_{i-1}, squared volume = d_n) is an
exact rational recovered from integers, so there is no rounding anywhere
and no per-operation gcd normalisation in the hot loops.
"""

from __future__ import annotations

from dataclasses import dataclass

from .numeric import Rat, round_nearest


class RankDeficientError(ValueError):
    """A supposed basis turned out to be linearly dependent."""


@dataclass(frozen=True)
class Basis:
    """Ordered tuple of n linearly independent integer vectors in Z^n."""

    vectors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.vectors)
        if n == 0:
            raise ValueError("empty basis")
        vecs = tuple(tuple(int(x) for x in v) for v in self.vectors)
        for v in vecs:
            if len(v) != n:
                raise ValueError(f"vector length {len(v)} != dimension {n} (full-rank square bases only)")
        object.__setattr__(self, "vectors", vecs)

    @property
    def n(self) -> int:
        return len(self.vectors)

    def norm_sq(self, i: int) -> int:
        """Squared euclidean norm of vector i (1-based)."""
        v = self.vectors[i - 1]
        return sum(x * x for x in v)

    def max_norm_sq(self) -> int:
        return max(sum(x * x for x in v) for v in self.vectors)


@dataclass(frozen=True)
class InsertionMove:
    """The permutation moving vector k in front of position i (1 <= i < k <= n)."""

    i: int
    k: int

    def __post_init__(self):
        if not 1 <= self.i < self.k:
            raise ValueError(f"insertion move needs 1 <= i < k, got i={self.i}, k={self.k}")


class _ExactCore:
    """Mutable integral GSO state used by the public ops and the reducers.

    Fields (0-based internally):
      vecs: list of row lists, vecs[i] = basis vector i
      gram: symmetric integer Gram matrix
      lam:  lam[i][j] = mu_ij * d[j+1] for j < i
      d:    d[0] = 1, d[i+1] = det(Gram of first i+1 vectors)
    """

    __slots__ = ("n", "vecs", "gram", "lam", "d")

    def __init__(self, n, vecs, gram, lam, d):
        self.n = n
        self.vecs = vecs
        self.gram = gram
        self.lam = lam
        self.d = d

    @classmethod
    def from_basis(cls, basis: Basis) -> "_ExactCore":
        n = basis.n
        vecs = [list(v) for v in basis.vectors]
        gram = [[sum(a * b for a, b in zip(vecs[i], vecs[j])) for j in range(n)] for i in range(n)]
        core = cls(n, vecs, gram, [[0] * n for _ in range(n)], [1] * (n + 1))
        core.refresh_rows(0)
        return core

    def clone(self) -> "_ExactCore":
        return _ExactCore(
            self.n,
            [list(v) for v in self.vecs],
            [list(r) for r in self.gram],
            [list(r) for r in self.lam],
            list(self.d),
        )

    def to_basis(self) -> Basis:
        return Basis(tuple(tuple(v) for v in self.vecs))

    # -- integral GSO ---------------------------------------------------

    def refresh_rows(self, start: int) -> None:
        """Recompute lam rows start..n-1 and d[start+1..n] from the Gram matrix.

        Rows before `start` depend only on vectors before `start`, so after a
        change confined to positions >= start they are reused untouched.  The
        inner divisions are exact by construction.
        """
        gram, lam, d = self.gram, self.lam, self.d
        for i in range(start, self.n):
            gi, li = gram[i], lam[i]
            for j in range(i + 1):
                u = gi[j]
                lj = lam[j]
                for t in range(j):
                    u = (d[t + 1] * u - li[t] * lj[t]) // d[t]
                if j < i:
                    li[j] = u
                else:
                    if u <= 0:
                        raise RankDeficientError(
                            f"vectors 1..{i + 1} are linearly dependent (Gram determinant {u})"
                        )
                    d[i + 1] = u

    def row_op(self, i: int, j: int, c: int) -> None:
        """b_i <- b_i - c*b_j (j < i), keeping Gram and lam consistent. O(n)."""
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
        # only mu row i changes; the new mu_ij' = mu_ij' - c*mu_jj' for j' < j
        li, lj, d = self.lam[i], self.lam[j], self.d
        for t in range(j):
            li[t] -= c * lj[t]
        li[j] -= c * d[j + 1]

    def size_reduce_pass(self) -> bool:
        """One full size-reduction sweep; returns True if anything changed.

        For each row i the columns run from i-1 DOWN to 1 so that the final
        coefficients all satisfy |mu_ij| <= 1/2 (an ascending sweep would let
        later subtractions spoil earlier columns).
        """
        lam, d = self.lam, self.d
        changed = False
        for i in range(1, self.n):
            li = lam[i]
            for j in range(i - 1, -1, -1):
                dj = d[j + 1]
                c = (2 * li[j] + dj) // (2 * dj)  # round_nearest(mu_ij), ties up
                if c:
                    self.row_op(i, j, c)
                    changed = True
        return changed

    def insert(self, i: int, k: int) -> None:
        """Apply the move-k-before-i permutation (0-based) and refresh the GSO."""
        self.vecs.insert(i, self.vecs.pop(k))
        gram = self.gram
        gram.insert(i, gram.pop(k))
        for row in gram:
            row.insert(i, row.pop(k))
        self.refresh_rows(i)

    # -- exact rational views (1-based indices) --------------------------

    def mu_rat(self, i: int, j: int):
        """mu_ij for 1 <= j < i <= n."""
        return Rat(self.lam[i - 1][j - 1], self.d[j])

    def bnorm(self, i: int):
        """B_i = squared norm of the i-th orthogonalised vector."""
        return Rat(self.d[i], self.d[i - 1])

    def norm_sq(self, i: int) -> int:
        return self.gram[i - 1][i - 1]

    def max_norm_sq(self) -> int:
        return max(self.gram[t][t] for t in range(self.n))

    def vol_sq(self) -> int:
        return self.d[self.n]

    def pot_int(self) -> int:
        """Product over i of B_i^(n-i+1); an integer because it telescopes to d_1*...*d_n."""
        p = 1
        for i in range(1, self.n + 1):
            p *= self.d[i]
        return p

    def ss_rat(self):
        s = Rat(0)
        for i in range(1, self.n + 1):
            s += Rat(self.d[i], self.d[i - 1])
        return s

    def proj_norms(self, k: int) -> list:
        """[D_1..D_k] with D_j = squared norm of b_k projected past b_1..b_{j-1}.

        Built by the backward recursion D_k = B_k, D_j = D_{j+1} + mu_kj^2 B_j.
        """
        d, lamk = self.d, self.lam[k - 1]
        out = [None] * k
        cur = Rat(self.d[k], self.d[k - 1])
        out[k - 1] = cur
        for j in range(k - 1, 0, -1):
            l = lamk[j - 1]
            cur = cur + Rat(l * l, d[j] * d[j - 1])  # mu_kj^2 * B_j
            out[j - 1] = cur
        return out

    def mu2b(self, k: int, j: int):
        """mu_kj^2 * B_j as an exact rational."""
        l = self.lam[k - 1][j - 1]
        return Rat(l * l, self.d[j] * self.d[j - 1])


class GsoState:
    """Immutable exact Gram-Schmidt data for a basis.

    Exposes the coefficient matrix `mu` (strictly lower triangular, exact
    rationals), the squared norms `bnorms`, and, lazily, the orthogonalised
    vectors themselves.  Instances are produced by compute_gso and by the
    operations below; treat them as values.
    """

    __slots__ = ("_core", "_mu", "_bnorms", "_vectors")

    def __init__(self, core: _ExactCore):
        self._core = core
        self._mu = None
        self._bnorms = None
        self._vectors = None

    @property
    def n(self) -> int:
        return self._core.n

    @property
    def mu(self) -> tuple:
        """n x n matrix of mu_ij as exact rationals; zero on and above the diagonal."""
        if self._mu is None:
            n = self._core.n
            zero = Rat(0)
            self._mu = tuple(
                tuple(self._core.mu_rat(i, j) if j < i else zero for j in range(1, n + 1))
                for i in range(1, n + 1)
            )
        return self._mu

    @property
    def bnorms(self) -> tuple:
        """(B_1, ..., B_n) as exact rationals; all positive."""
        if self._bnorms is None:
            self._bnorms = tuple(self._core.bnorm(i) for i in range(1, self._core.n + 1))
        return self._bnorms

    @property
    def gso_vectors(self) -> tuple:
        """The orthogonalised vectors b*_1..b*_n as exact rational tuples.

        Materialised on first use; only example and conformance paths need them.
        """
        if self._vectors is None:
            n = self._core.n
            mu = self.mu
            stars: list[list] = []
            for i in range(n):
                v = [Rat(x) for x in self._core.vecs[i]]
                for j in range(i):
                    m = mu[i][j]
                    if m:
                        v = [a - m * b for a, b in zip(v, stars[j])]
                stars.append(v)
            self._vectors = tuple(tuple(v) for v in stars)
        return self._vectors

    def _matches(self, basis: Basis) -> bool:
        return all(tuple(v) == w for v, w in zip(self._core.vecs, basis.vectors))


def compute_gso(basis: Basis) -> GsoState:
    """Exact Gram-Schmidt orthogonalisation of a full-rank integer basis.

    Raises RankDeficientError if the vectors are linearly dependent.
    """
    return GsoState(_ExactCore.from_basis(basis))


def _checked_core(basis: Basis, gso: GsoState) -> _ExactCore:
    if gso.n != basis.n or not gso._matches(basis):
        raise ValueError("GsoState is not consistent with the given basis")
    return gso._core.clone()


def size_reduce(basis: Basis, gso: GsoState) -> tuple[Basis, GsoState]:
    """Size-reduce: subtract rounded projections until every |mu_ij| <= 1/2.

    The lattice, the orthogonalised vectors, and all B_i are unchanged.
    """
    core = _checked_core(basis, gso)
    core.size_reduce_pass()
    return core.to_basis(), GsoState(core)


def apply_insertion(basis: Basis, gso: GsoState, move: InsertionMove) -> tuple[Basis, GsoState]:
    """Move vector k in front of position i and recompute the affected GSO rows.

    Rows 1..i-1 of the orthogonalisation depend only on vectors 1..i-1 and are
    reused; rows i..n are recomputed from scratch off the permuted Gram matrix,
    which is exactly the result a full recomputation would give.
    """
    if move.k > basis.n:
        raise ValueError(f"insertion move k={move.k} exceeds dimension {basis.n}")
    core = _checked_core(basis, gso)
    core.insert(move.i - 1, move.k - 1)
    return core.to_basis(), GsoState(core)


def projected_norms(gso: GsoState, k: int) -> list:
    """[D_1..D_k]: exact squared norms of the projections of b_k (1 <= k <= n).

    D_k = B_k, D_1 = |b_k|^2, and the sequence is non-increasing in j.
    """
    if not 1 <= k <= gso.n:
        raise ValueError(f"index k={k} out of range 1..{gso.n}")
    return gso._core.proj_norms(k)


def volume_sq(gso: GsoState):
    """Squared lattice volume = product of all B_i = det(B)^2, exact."""
    return Rat(gso._core.vol_sq())


def pot(gso: GsoState):
    """Potential: product of B_i^(n-i+1) = product of the squared sublattice
    volumes.  A positive integer for integer bases."""
    return Rat(gso._core.pot_int())


def ss(gso: GsoState):
    """Squared sum: B_1 + ... + B_n, exact."""
    return gso._core.ss_rat()


def sigma_basis(basis: Basis, i: int, k: int) -> Basis:
    """The basis after the move-k-before-i permutation, without GSO data."""
    if not 1 <= i < k <= basis.n:
        raise ValueError(f"need 1 <= i < k <= n, got i={i}, k={k}, n={basis.n}")
    vecs = list(basis.vectors)
    vecs.insert(i - 1, vecs.pop(k - 1))
    return Basis(tuple(vecs))


__all__ = [
    "Basis",
    "GsoState",
    "InsertionMove",
    "RankDeficientError",
    "apply_insertion",
    "compute_gso",
    "pot",
    "projected_norms",
    "sigma_basis",
    "size_reduce",
    "ss",
    "volume_sq",
]

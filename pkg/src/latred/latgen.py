"""Seeded input-basis generators and the on-disk basis format.

Two families, matching the benchmark protocol:

  svp-like    upper triangular with a large odd first entry q and unit
              diagonal, the shape of SVP-challenge instances; volume = q
  unimodular  identity churned by `steps` random elementary column
              additions; volume 1, so the lattice is all of Z^n

On disk a basis is plain text: first line n, then n lines of n decimal
integers, line i holding basis vector i.  Written with LF endings; any
line endings are accepted on read.  Entries of any size round-trip exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .gso import Basis, RankDeficientError, compute_gso
from .numeric import Prng

SVP_LIKE = "svp"
UNIMODULAR = "uni"

DEFAULT_UNIMODULAR_STEPS = 1000


class BasisParseError(ValueError):
    """Malformed basis file; message carries the offending line."""


@dataclass(frozen=True)
class GenSpec:
    """What to generate: family, dimension, seed, and the family's size knob.

    bits (svp-like only) is the bit length of the corner entry q and
    defaults to 10*n, keeping the instance in the regime where the largest
    vector is comparable to the volume.  steps (unimodular only) is the
    number of column operations, default 1000.
    """

    kind: str
    n: int
    seed: int
    bits: int | None = None
    steps: int = DEFAULT_UNIMODULAR_STEPS

    def __post_init__(self):
        if self.kind not in (SVP_LIKE, UNIMODULAR):
            raise ValueError(f"kind must be {SVP_LIKE!r} or {UNIMODULAR!r}, got {self.kind!r}")
        if self.n < 2:
            raise ValueError(f"dimension must be >= 2, got {self.n}")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.bits is not None and self.bits < 2:
            raise ValueError("bits must be >= 2")

    @property
    def resolved_bits(self) -> int:
        return self.bits if self.bits is not None else 10 * self.n


def gen_svp_like(spec: GenSpec) -> Basis:
    """Upper-triangular challenge-style basis, deterministic in the seed.

    b_1 = (q, 0, ..., 0) with q a uniform odd integer in [2^(bits-1), 2^bits);
    b_j = (a_j, 0, .., 1 at row j, .., 0) with a_j uniform in [0, q).
    Draw order is q first, then a_2..a_n.
    """
    if spec.kind != SVP_LIKE:
        raise ValueError(f"spec.kind is {spec.kind!r}, expected {SVP_LIKE!r}")
    n = spec.n
    bits = spec.resolved_bits
    rng = Prng(spec.seed)
    q = 2 * rng.uniform(1 << (bits - 2)) + (1 << (bits - 1)) + 1
    vecs = [[0] * n for _ in range(n)]
    vecs[0][0] = q
    for j in range(1, n):
        vecs[j][0] = rng.uniform(q)
        vecs[j][j] = 1
    return Basis(tuple(tuple(v) for v in vecs))


def gen_unimodular(spec: GenSpec) -> Basis:
    """Random determinant-+-1 basis of Z^n, deterministic in the seed.

    Each step draws a source column c1 uniform in [0, n), a distinct target
    c2 uniform among the remaining n-1 columns (values >= c1 shifted up by
    one), and a sign (+1 for an even word, -1 for odd), then adds sign * b_c1
    to b_c2.  The draw order per step is c1, c2, sign.
    """
    if spec.kind != UNIMODULAR:
        raise ValueError(f"spec.kind is {spec.kind!r}, expected {UNIMODULAR!r}")
    n = spec.n
    rng = Prng(spec.seed)
    vecs = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(spec.steps):
        c1 = rng.uniform(n)
        c2 = rng.uniform(n - 1)
        if c2 >= c1:
            c2 += 1
        sign = 1 if rng.uniform(2) == 0 else -1
        src = vecs[c1]
        dst = vecs[c2]
        for t in range(n):
            dst[t] += sign * src[t]
    return Basis(tuple(tuple(v) for v in vecs))


def generate(spec: GenSpec) -> Basis:
    return gen_svp_like(spec) if spec.kind == SVP_LIKE else gen_unimodular(spec)


def write_basis(path, basis: Basis) -> None:
    """Write the text format described in the module docstring."""
    lines = [str(basis.n)]
    for v in basis.vectors:
        lines.append(" ".join(str(x) for x in v))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_basis(path) -> Basis:
    """Parse a basis file; checks shape, integer syntax, and full rank.

    Raises BasisParseError (with the line number) for malformed input and
    RankDeficientError for a well-formed but linearly dependent matrix.
    """
    text = Path(path).read_text(encoding="ascii")
    lines = text.splitlines()
    idx = 0

    def next_line():
        nonlocal idx
        while idx < len(lines):
            idx += 1
            stripped = lines[idx - 1].strip()
            if stripped:
                return stripped, idx
        return None, idx

    first, lineno = next_line()
    if first is None:
        raise BasisParseError("empty basis file")
    try:
        n = int(first)
    except ValueError:
        raise BasisParseError(f"line {lineno}: expected the dimension, got {first!r}") from None
    if n < 1:
        raise BasisParseError(f"line {lineno}: dimension must be positive, got {n}")
    vecs = []
    for row in range(n):
        line, lineno = next_line()
        if line is None:
            raise BasisParseError(f"unexpected end of file: expected {n} vectors, got {row}")
        tokens = line.split()
        if len(tokens) != n:
            raise BasisParseError(f"line {lineno}: expected {n} entries, got {len(tokens)}")
        try:
            vecs.append(tuple(int(t) for t in tokens))
        except ValueError as exc:
            raise BasisParseError(f"line {lineno}: {exc}") from None
    extra, lineno = next_line()
    if extra is not None:
        raise BasisParseError(f"line {lineno}: trailing content after {n} vectors")
    basis = Basis(tuple(vecs))
    compute_gso(basis)  # raises RankDeficientError on dependent rows
    return basis


__all__ = [
    "BasisParseError",
    "DEFAULT_UNIMODULAR_STEPS",
    "GenSpec",
    "SVP_LIKE",
    "UNIMODULAR",
    "gen_svp_like",
    "gen_unimodular",
    "generate",
    "read_basis",
    "write_basis",
]

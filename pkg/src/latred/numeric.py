"""Exact scalar arithmetic, log-space values, and a deterministic PRNG.

All rational arithmetic in this package goes through the ``Rat`` alias
defined here.  By default it is ``gmpy2.mpq``; setting the environment
variable ``LATRED_RAT_BACKEND=fraction`` before import selects the pure
stdlib ``fractions.Fraction`` instead (slower, zero non-stdlib deps for
the rational side).  Both backends are exact and produce bit-identical
results everywhere.
"""

from __future__ import annotations

import os
from fractions import Fraction

_BACKEND = os.environ.get("LATRED_RAT_BACKEND", "auto").lower()

if _BACKEND not in ("auto", "gmpy2", "fraction"):
    raise ValueError(f"LATRED_RAT_BACKEND must be auto|gmpy2|fraction, got {_BACKEND!r}")

if _BACKEND == "fraction":
    Rat = Fraction
    RAT_BACKEND = "fraction"
else:
    try:
        from gmpy2 import mpq as Rat  # type: ignore[no-redef]

        RAT_BACKEND = "gmpy2"
    except ImportError:
        if _BACKEND == "gmpy2":
            raise
        Rat = Fraction  # type: ignore[assignment]
        RAT_BACKEND = "fraction"


def rat(num, den=1):
    """Exact rational num/den (always in lowest terms, positive denominator)."""
    return Rat(num, den)


def parse_rat(text: str):
    """Parse 'a/b', an integer, or a decimal string into an exact rational."""
    return Rat(Fraction(text.strip()))


def round_nearest(x) -> int:
    """Round to the nearest integer, ties toward +infinity.

    Equals floor(x + 1/2), so the result m is the unique integer with
    x - 1/2 <= m < x + 1/2.  Works for int, Fraction, and mpq inputs.
    The tie direction is fixed so reduction traces are deterministic.
    """
    num = x.numerator if hasattr(x, "numerator") else x
    den = x.denominator if hasattr(x, "denominator") else 1
    return (2 * num + den) // (2 * den)


# ---------------------------------------------------------------------------
# Log-space values
# ---------------------------------------------------------------------------

import mpmath

#: working precision (bits of mantissa) for log-space arithmetic; gives far
#: more than 64 fractional bits for the magnitudes that occur here, so any
#: composed bound expression is accurate to well below 2^-40 relative error.
LOG_PRECISION = 160


class LogVal:
    """A positive real stored as its natural logarithm.

    Loop-count bounds reach exp(Theta(n^2 log n)) and overflow any
    fixed-width type, so only their logarithms are carried around.
    Instances are immutable; arithmetic maps to the represented value:
    ``a + b`` is the log of a product, ``a * k`` the log of a power.
    """

    __slots__ = ("ln",)

    def __init__(self, ln_value):
        object.__setattr__(self, "ln", mpmath.mpf(ln_value))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("LogVal is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def of_rat(cls, x) -> "LogVal":
        """Log of a positive rational, exact to working precision."""
        num = x.numerator if hasattr(x, "numerator") else x
        den = x.denominator if hasattr(x, "denominator") else 1
        if num <= 0 or den <= 0:
            raise ValueError(f"logarithm of non-positive value {x!r}")
        with mpmath.workprec(LOG_PRECISION):
            return cls(mpmath.log(mpmath.mpf(num)) - mpmath.log(mpmath.mpf(den)))

    @classmethod
    def of_sqrt_rat(cls, x) -> "LogVal":
        """Log of sqrt(x) for positive rational x (i.e. half of log x)."""
        v = cls.of_rat(x)
        with mpmath.workprec(LOG_PRECISION):
            return cls(v.ln / 2)

    @classmethod
    def zero(cls) -> "LogVal":
        """Log of 1."""
        return cls(0)

    # -- arithmetic on represented values ------------------------------

    def __add__(self, other: "LogVal") -> "LogVal":
        with mpmath.workprec(LOG_PRECISION):
            return LogVal(self.ln + other.ln)

    def __sub__(self, other: "LogVal") -> "LogVal":
        with mpmath.workprec(LOG_PRECISION):
            return LogVal(self.ln - other.ln)

    def __mul__(self, k) -> "LogVal":
        """Log of the represented value raised to a scalar power k."""
        num = k.numerator if hasattr(k, "numerator") else k
        den = k.denominator if hasattr(k, "denominator") else 1
        with mpmath.workprec(LOG_PRECISION):
            return LogVal(self.ln * num / den)

    __rmul__ = __mul__

    def add_value(self, other: "LogVal") -> "LogVal":
        """Log of the SUM of the two represented values (log-sum-exp)."""
        with mpmath.workprec(LOG_PRECISION):
            hi, lo = (self.ln, other.ln) if self.ln >= other.ln else (other.ln, self.ln)
            return LogVal(hi + mpmath.log1p(mpmath.exp(lo - hi)))

    def sub_const(self, c) -> "LogVal":
        """Log of (value - c) for a small constant c; value must exceed c."""
        with mpmath.workprec(LOG_PRECISION):
            t = c * mpmath.exp(-self.ln)
            if t >= 1:
                raise ValueError("sub_const would produce a non-positive value")
            return LogVal(self.ln + mpmath.log1p(-t))

    # -- comparisons ---------------------------------------------------

    def __le__(self, other: "LogVal") -> bool:
        return self.ln <= other.ln

    def __lt__(self, other: "LogVal") -> bool:
        return self.ln < other.ln

    def __ge__(self, other: "LogVal") -> bool:
        return self.ln >= other.ln

    def __gt__(self, other: "LogVal") -> bool:
        return self.ln > other.ln

    def __eq__(self, other) -> bool:
        return isinstance(other, LogVal) and self.ln == other.ln

    def __hash__(self):
        return hash(("LogVal", self.ln))

    def le_with_margin(self, other: "LogVal", margin=2.0 ** -40) -> bool:
        """self <= other allowing the documented relative error budget."""
        with mpmath.workprec(LOG_PRECISION):
            slack = margin * (1 + max(abs(self.ln), abs(other.ln)))
            return self.ln <= other.ln + slack

    # -- views ----------------------------------------------------------

    @property
    def log2(self) -> float:
        with mpmath.workprec(LOG_PRECISION):
            return float(self.ln / mpmath.log(2))

    def __float__(self) -> float:
        """The represented value as a float (inf if it overflows)."""
        try:
            return float(mpmath.exp(self.ln))
        except OverflowError:  # pragma: no cover
            return float("inf")

    def __repr__(self) -> str:
        return f"LogVal(ln={mpmath.nstr(self.ln, 17)})"


def logval_of_rat(x) -> LogVal:
    """Natural log of a positive rational as a LogVal."""
    return LogVal.of_rat(x)


# ---------------------------------------------------------------------------
# Deterministic PRNG
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1


class Prng:
    """splitmix64 generator with rejection-sampled uniform integers.

    Chosen because the whole algorithm fits in a few lines and therefore
    reproduces identically in any language; identical seeds give identical
    streams on every platform.  Single-owner mutable: do not share one
    instance between threads.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        """Next raw 64-bit output."""
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self, bound: int) -> int:
        """Uniform integer in [0, bound), for any bound >= 1.

        Uses ceil(bits/64) raw words assembled big-endian, rejecting the
        biased tail.  bound == 1 consumes nothing from the stream.
        """
        if bound < 1:
            raise ValueError(f"bound must be >= 1, got {bound}")
        if bound == 1:
            return 0
        words = ((bound - 1).bit_length() + 63) // 64
        span = 1 << (64 * words)
        limit = span - span % bound
        while True:
            r = 0
            for _ in range(words):
                r = (r << 64) | self.next_u64()
            if r < limit:
                return r % bound


def prng_uniform(p: Prng, bound: int) -> int:
    """Uniform integer in [0, bound) drawn from p."""
    return p.uniform(bound)

import pytest

from latred import Basis, Prng, compute_gso
from latred.gso import RankDeficientError


def random_basis(seed: int, n: int, span: int = 5) -> Basis:
    """Full-rank basis with entries uniform in [-span, span], deterministic in seed."""
    rng = Prng(seed)
    width = 2 * span + 1
    while True:
        vecs = tuple(
            tuple(rng.uniform(width) - span for _ in range(n)) for _ in range(n)
        )
        try:
            basis = Basis(vecs)
            compute_gso(basis)
            return basis
        except (RankDeficientError, ValueError):
            continue


@pytest.fixture
def identity3() -> Basis:
    return Basis(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import ufiaudit as u

PAPER_2TXN = "A:0.5 B:0.6\nA:0.4 B:0.5"
DET_5TXN = "A:1 B:1 C:1\nA:1 B:1\nA:1 B:1 D:1\nC:1 D:1\nA:1 D:1"
REPL_3TXN = "A:1 B:1\nA:1\nB:1"


@pytest.fixture
def paper_db():
    """Two-transaction running example: A(0.5)B(0.6), A(0.4)B(0.5)."""
    return u.parse_database(PAPER_2TXN)


@pytest.fixture
def det_db():
    """Deterministic five-transaction database {ABC, AB, ABD, CD, AD}."""
    return u.parse_database(DET_5TXN)


@pytest.fixture
def repl_db():
    """Deterministic {AB, A, B} used for the replication-weight example."""
    return u.parse_database(REPL_3TXN)


def random_small_db(rng, max_txns=5, max_items=3):
    """Random database small enough for full world enumeration."""
    n = int(rng.integers(1, max_txns + 1))
    k = int(rng.integers(1, max_items + 1))
    return u.generate_synthetic(
        n, k, density=0.8, prob_range=(0.1, 0.95), seed=int(rng.integers(2**32))
    )


def random_db(rng, max_txns=200, max_items=8):
    n = int(rng.integers(2, max_txns + 1))
    k = int(rng.integers(2, max_items + 1))
    return u.generate_synthetic(
        n, k, density=0.6, prob_range=(0.05, 1.0), seed=int(rng.integers(2**32))
    )

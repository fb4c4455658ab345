import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dpapsd import exact_apsd, generate_partial_ktree


def make_corpus(count, n_lo, n_hi, seed0, ks=(1, 2, 3, 4), weight_range=(0.0, 10.0)):
    """Deterministic spread of partial k-trees over sizes and densities."""
    keeps = (1.0, 0.85, 0.7)
    bundles = []
    for i in range(count):
        k = ks[i % len(ks)]
        n = n_lo + ((n_hi - n_lo) * i) // max(1, count - 1)
        n = max(n, k + 1)
        bundles.append(
            generate_partial_ktree(
                n=n,
                k=k,
                edge_keep_prob=keeps[i % len(keeps)],
                weight_range=weight_range,
                seed=seed0 + i,
            )
        )
    return bundles


@pytest.fixture(scope="session")
def small_corpus():
    """A couple dozen desk-size instances for module-level property tests."""
    return make_corpus(24, 12, 90, seed0=1000)


@pytest.fixture(scope="session")
def acceptance_corpus():
    """The 100-instance corpus used by the acceptance criteria (n <= 200,
    k <= 4, weights uniform [0, 10]), with exact distances cached."""
    bundles = make_corpus(100, 20, 200, seed0=42)
    return [(b, exact_apsd(b.graph)) for b in bundles]

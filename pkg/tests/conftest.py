import math

import numpy as np
import pytest

from rabi_balance import BOSON, SPIN_BOSON, QuantumState


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def padded_random_state(rng, dim, support, kind=SPIN_BOSON):
    """Random state whose amplitude lives on the leading ``support`` entries.

    Operators built at ``dim`` act exactly on such states (no truncation
    edge effects), which is what lets commutator identities hold to
    machine precision in tests.
    """
    v = np.zeros(dim, dtype=complex)
    v[:support] = rng.normal(size=support) + 1j * rng.normal(size=support)
    return QuantumState.from_vector(v, kind)


def coherent_vector(dim, beta):
    """Analytic coherent-state amplitudes e^{-b^2/2} b^n / sqrt(n!)."""
    facs = np.array([math.factorial(n) for n in range(dim)], dtype=float)
    return np.exp(-beta**2 / 2.0) * beta ** np.arange(dim) / np.sqrt(facs)

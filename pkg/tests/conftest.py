from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from krein_kernels.rng import SplitMix64

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng() -> SplitMix64:
    return SplitMix64(20240601)


def random_hermitian(rng: SplitMix64, n: int) -> np.ndarray:
    X = rng.complex_normals((n, n))
    return (X + X.conj().T) / 2


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

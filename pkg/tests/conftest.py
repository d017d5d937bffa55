import numpy as np
import pytest

from seqforge import SubcarrierAssignment

ACCEPTANCE_LINES = []


def fft_papr(p, assignment):
    """Independent PAPR oracle: oversampled IFFT of the subcarrier spectrum."""
    n_s = assignment.n_samples
    spectrum = np.zeros(n_s, dtype=np.complex128)
    spectrum[np.mod(assignment.indices, n_s)] = p
    samples = n_s * np.fft.ifft(spectrum)
    return float(np.max(np.abs(samples) ** 2))


def brute_coherence(p):
    best = 0.0
    n = p.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            best = max(best, abs(np.vdot(p[i], p[j])))
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def contiguous8():
    return SubcarrierAssignment.contiguous(8, n_samples=64)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

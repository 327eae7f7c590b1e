import numpy as np
import pytest

from cifc.channel import channel_from_kernel, channel_from_maps

_ACCEPTANCE_LINES: list[str] = []


def record(line: str) -> None:
    """Collect one acceptance verdict for the end-of-run summary."""
    print(line)
    _ACCEPTANCE_LINES.append(line)


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_channel(rng, n1=2, n2=2, m1=2, m2=2, alpha=0.5):
    k = rng.dirichlet(np.full(m1 * m2, alpha), size=(n1, n2)).reshape(n1, n2, m1, m2)
    return channel_from_kernel(k)


def random_semidet_channel(rng, n1=2, n2=2, m1=2, m2=2, alpha=0.5):
    f1 = rng.integers(0, m1, size=(n1, n2))
    k = np.zeros((n1, n2, m1, m2))
    q = rng.dirichlet(np.full(m2, alpha), size=(n1, n2))
    for a in range(n1):
        for b in range(n2):
            k[a, b, f1[a, b]] = q[a, b]
    return channel_from_kernel(k)


def random_det_channel(rng, n1=3, n2=3, m1=3, m2=3):
    return channel_from_maps(rng.integers(0, m1, size=(n1, n2)),
                             rng.integers(0, m2, size=(n1, n2)), m1, m2)

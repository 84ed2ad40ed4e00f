import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_unitary(rng, d=2):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for rep in terminalreporter.getreports("passed") + terminalreporter.getreports("failed"):
        for key, value in rep.user_properties:
            if key == "criterion" and rep.when == "call":
                lines.append((value, "PASS" if rep.passed else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, verdict in sorted(lines, key=lambda x: int(x[0].split(".")[0])):
            terminalreporter.write_line(f"{verdict}  {name}")

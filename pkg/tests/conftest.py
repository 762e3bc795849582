import numpy as np
import pytest

from assocemp.sequence_gen import build_gaussian_linear_model


@pytest.fixture(scope="session")
def iid():
    return build_gaussian_linear_model("iid")


@pytest.fixture(scope="session")
def power3():
    return build_gaussian_linear_model("power_law", alpha=3)


@pytest.fixture(scope="session")
def ar_half():
    return build_gaussian_linear_model("ar1", phi=0.5)


SHIPPED_MODELS = [
    ("iid", {}),
    ("ar1", {"phi": 0.0}),
    ("ar1", {"phi": 0.5}),
    ("ar1", {"phi": 0.9}),
    ("ar1", {"phi": 0.99}),
    ("power_law", {"alpha": 0.5}),
    ("power_law", {"alpha": 1.0}),
    ("power_law", {"alpha": 2.5}),
    ("power_law", {"alpha": 3.0}),
    ("power_law", {"alpha": 5.0}),
    ("power_law", {"alpha": 3.0, "j_max": 1}),
]


def mc_bivariate_normal(rho, size, seed, chunk=10**6):
    """Yield correlated standard-normal pairs in chunks (independent oracle draws)."""
    rng = np.random.default_rng(seed)
    done = 0
    while done < size:
        m = min(chunk, size - done)
        z1 = rng.standard_normal(m)
        z2 = rho * z1 + np.sqrt(1 - rho * rho) * rng.standard_normal(m)
        done += m
        yield z1, z2


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])

import pytest

from masec.surrogate import fit_linear_surrogate


@pytest.fixture(scope="session")
def table():
    """One surrogate table per test session; the fit is deterministic."""
    return fit_linear_surrogate()

import pytest

from futuresopt import ModelParams, RiskPrefs

T1 = 13.0 / 12.0
T2 = 14.0 / 12.0


@pytest.fixture
def params():
    """Base calibration used throughout the tests."""
    return ModelParams(mu=0.010, kappa=0.800, alpha=0.0, eta=0.450,
                       eta_bar=0.500, rho=0.750, lam=0.050, r=0.001)


@pytest.fixture
def prefs():
    return RiskPrefs(gamma=0.01, horizon=1.0)


@pytest.fixture
def maturities():
    return T1, T2

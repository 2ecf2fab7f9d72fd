import pytest

from ethena_ctl.fh import integrate_backward
from ethena_ctl.ih import solve_ih
from ethena_ctl.params import ModelParams


def make_reference_params(**overrides) -> ModelParams:
    """Benchmark configuration used throughout the suite."""
    base = dict(
        rho=0.05, kappa=2.0, m=0.04,
        mu1=0.2, mu2=0.1, lam1=0.06, lam2=0.04,
        r=0.04, q=4.0, c=0.1, phi=0.5,
        lamT=4.0, T=1.0, d0=0.04, n0=0.0, x0=0.0,
    )
    base.update(overrides)
    return ModelParams(**base)


@pytest.fixture(scope="session")
def reference_params() -> ModelParams:
    return make_reference_params()


@pytest.fixture(scope="session")
def ih_solution(reference_params):
    return solve_ih(reference_params)


@pytest.fixture(scope="session")
def fh_path_1000(reference_params):
    return integrate_backward(reference_params, 1000)


@pytest.fixture(scope="session")
def fh_path_2000(reference_params):
    return integrate_backward(reference_params, 2000)

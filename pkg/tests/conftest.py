import pytest

from lzsim import ModelParams, kernels


@pytest.fixture(scope="session")
def fe():
    return ModelParams.fe_mgo()


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # pay the one-time jit cost before any timed test runs
    kernels.warmup()

import numpy as np
import pytest

from fluidseis import (InjectionProfile, MagnitudeModel, RateParams,
                       SimulationSpec, simulate)

# shared ground truth for the synthetic fixtures
THETA = RateParams(a_fb=-0.5, b=1.15, tau=1.8)
M0 = 1.0
MU = 7.0
T_END = 30.0
SHUT_IN = 20.0


@pytest.fixture(scope="session")
def const_profile():
    return InjectionProfile.constant(2400.0, shut_in=SHUT_IN)


@pytest.fixture(scope="session")
def step_profile():
    return InjectionProfile.from_breakpoints(
        [(0.0, 2400.0), (2.0, 4800.0), (5.0, 1200.0), (20.0, 0.0)],
        shut_in=20.0)


@pytest.fixture(scope="session")
def sim_catalog(const_profile):
    spec = SimulationSpec(theta=THETA, profile=const_profile,
                          mag=MagnitudeModel(b=THETA.b, m0=M0, mu=MU),
                          t_end=T_END, seed=4242)
    return simulate(spec)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(987654321)

import pytest

from painleve_connect import connecting as pde
from painleve_connect import ginzburg_landau as gl
from painleve_connect.hastings_mcleod import HMProblem, solve_hastings_mcleod


@pytest.fixture(scope="session")
def hm():
    prob = HMProblem.default()
    return prob, solve_hastings_mcleod(prob)


@pytest.fixture(scope="session")
def connect():
    prob = pde.make_problem()
    return prob, pde.solve_connecting(prob)


@pytest.fixture(scope="session")
def gl_chain():
    return gl.continuation([0.1, 0.05, 0.025])

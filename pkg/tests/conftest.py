import math

import pytest

from tauberlab import BoxDomain, build_gamma, build_rho_from_zeta, random_ensemble, solve_zeta


@pytest.fixture(scope="session")
def rho_m1():
    return build_rho_from_zeta(solve_zeta(1))


@pytest.fixture(scope="session")
def rho_m2():
    return build_rho_from_zeta(solve_zeta(2))


@pytest.fixture(scope="session")
def rho_m3():
    return build_rho_from_zeta(solve_zeta(3))


@pytest.fixture(scope="session")
def gamma_l1():
    return build_gamma(1)


@pytest.fixture(scope="session")
def gamma_l2():
    return build_gamma(2)


@pytest.fixture(scope="session")
def gamma_l3():
    return build_gamma(3)


@pytest.fixture(scope="session")
def ensemble():
    return random_ensemble(42, 200)


@pytest.fixture(scope="session")
def interval_box():
    return BoxDomain([math.pi], cutoff=4.0e4)


@pytest.fixture(scope="session")
def square_box():
    return BoxDomain([1.0, 1.0], cutoff=2.2e4)


@pytest.fixture(scope="session")
def cube_box():
    return BoxDomain([1.0, 1.0, 1.0], cutoff=4.0e3)

import warnings

import pytest

from vscrate import vibsolver


@pytest.fixture(scope="session")
def spectrum():
    return vibsolver.solve_double_well()


@pytest.fixture(scope="session")
def basis(spectrum):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return vibsolver.diabatize(spectrum)

import pytest

from memfhn.grid import Grid2D
from memfhn.model import NonlinearityBounds
from memfhn.repro import load_paper_config


@pytest.fixture(scope="session")
def paper_doc():
    return load_paper_config()


@pytest.fixture
def reference_params(paper_doc):
    """The published parameter set with the constants' memristor coupling."""
    return paper_doc.theory_params()


@pytest.fixture
def kappa1_bounds():
    return NonlinearityBounds.prototype(1.0)


@pytest.fixture
def small_grid():
    return Grid2D(8, 8, 1.0)

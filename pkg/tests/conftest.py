import pytest

from loopenum.cocycles import Variety
from loopenum.pipeline import enumerate_order, seed_catalog


@pytest.fixture(scope="session")
def bruck9():
    return enumerate_order(3, 2, Variety.BRUCK, seed_catalog("bruck", 3))


@pytest.fixture(scope="session")
def bruck27(bruck9):
    return enumerate_order(3, 3, Variety.BRUCK, bruck9)


@pytest.fixture(scope="session")
def ca9():
    return enumerate_order(3, 2, Variety.COMM_AUTOMORPHIC,
                           seed_catalog("ca", 3))


@pytest.fixture(scope="session")
def ca27(ca9):
    return enumerate_order(3, 3, Variety.COMM_AUTOMORPHIC, ca9)


@pytest.fixture(scope="session")
def nonassoc27(bruck27):
    """A nonassociative left Bruck loop of order 27."""
    return next(e.table for e in bruck27.entries
                if not e.table.is_associative())

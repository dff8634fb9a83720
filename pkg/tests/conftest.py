import warnings

import pytest
from hypothesis import HealthCheck, settings

from isospectral import basic_simplex, build_assembly, load_family

settings.register_profile(
    "repo", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def fam71():
    return load_family("7_1")


@pytest.fixture(scope="session")
def simplex_pair():
    """Factory: the two Basic Simplex models of a 7-tile family."""
    cache = {}

    def make(fid):
        if fid not in cache:
            pair = load_family(fid)
            cache[fid] = tuple(
                build_assembly(pair.side(s), basic_simplex(), root_tile=pair.root(s)) for s in "AB")
        return cache[fid]

    return make


@pytest.fixture(autouse=True)
def _quiet_lattice_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="domain vertices are off")
        yield

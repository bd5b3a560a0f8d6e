"""Shared fixtures: constellations and a session-wide derived modcod table."""

import pytest

from hmplan.capacity import IntegrationSpec
from hmplan.constellation import build_hierarchical_16qam, build_reference
from hmplan.thresholds import DEFAULT_ALPHAS, build_modcod_table, shipped_references


@pytest.fixture(scope="session")
def gh_spec():
    return IntegrationSpec()


@pytest.fixture(scope="session")
def qpsk():
    return build_reference("QPSK")


@pytest.fixture(scope="session")
def qam16():
    return build_reference("UNIFORM_16QAM")


@pytest.fixture(scope="session")
def hier_alpha1():
    return build_hierarchical_16qam(1.0)


@pytest.fixture(scope="session")
def references():
    return shipped_references()


@pytest.fixture(scope="session")
def table(references, gh_spec):
    """Modcod table derived once per session from the shipped references."""
    return build_modcod_table(DEFAULT_ALPHAS, references, spec=gh_spec)

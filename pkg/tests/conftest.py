from pathlib import Path

import pytest

from reannotate import load_hierarchy

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def excerpt_path():
    return FIXTURES / "hierarchy_excerpt.json"


@pytest.fixture(scope="session")
def excerpt(excerpt_path):
    """The worked-example hierarchy excerpt (per/org branches plus no_relation)."""
    return load_hierarchy(excerpt_path)

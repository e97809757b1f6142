import os
import sys

import pytest

# Add the project root to Python path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from dsdomain.harness.corpus import load_corpus
from dsdomain.poincare.domain import build_domain


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def domain(corpus):
    return build_domain(corpus.generator_set())

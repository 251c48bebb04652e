import numpy as np
import pytest
from hypothesis import strategies as st

from pslconj.models import NAMES, model_path, model_text
from pslconj.rules import ground, parse_program

unit_float = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


def prob_vectors(min_size=1, max_size=6):
    return st.lists(unit_float, min_size=min_size, max_size=max_size)


@pytest.fixture(scope="session")
def models():
    return {name: ground(parse_program(model_text(name))) for name in NAMES}


@pytest.fixture(scope="session")
def model_files():
    return {name: str(model_path(name)) for name in NAMES}


def chain_like(w_ab, w_bc):
    """A -> B (weight w_ab), B -> C (weight w_bc), A=1 and C=0 observed."""
    text = f"""
    predicate A
    predicate B
    predicate C
    evidence A = 1.0
    evidence C = 0.0
    rule {w_ab!r} : A -> B
    rule {w_bc!r} : B -> C
    """
    return ground(parse_program(text))


def boundary_point(rng, n):
    # deficits from a flat Dirichlet sum to 1, so sum(p) == n - 1
    return 1.0 - rng.dirichlet(np.ones(n))


def upper_point(rng, n):
    excess = rng.uniform(1e-6, 1.0)
    return 1.0 - (1.0 - excess) * rng.dirichlet(np.ones(n))


def interior_point(rng, n):
    while True:
        p = rng.random(n)
        if p.sum() < n - 1 - 1e-9:
            return p

import numpy as np
import pytest

from mcms import CoverageInstance


def make_gap_instance() -> CoverageInstance:
    """Two-cell instance where greedy lands on 6 but the optimum is 7.

    Greedy grabs cell 1's PRB 0 (covers 5 users), after which the best
    cell 0 can add is 1 more; picking cell 0 PRB 0 and cell 1 PRB 1
    instead covers all 7.
    """
    return CoverageInstance(
        num_users=7,
        collections=[
            [{0, 1, 2, 3}, {4, 5}],
            [{0, 1, 2, 3, 4}, {4, 5, 6}],
        ],
        primary_cell=[0] * 7,
    )


@pytest.fixture
def gap_instance() -> CoverageInstance:
    return make_gap_instance()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)

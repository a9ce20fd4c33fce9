import pytest

from tannolab.manifolds import (cpn_height_function, flat_kahler_chart,
                                fubini_study_chart, sample_points)


@pytest.fixture(scope="session")
def fs1():
    return fubini_study_chart(1)


@pytest.fixture(scope="session")
def fs2():
    return fubini_study_chart(2)


@pytest.fixture(scope="session")
def fs1_unit():
    """CP(1) chart rescaled so the height field solves the c = 1 equation."""
    return fubini_study_chart(1).rescaled(0.25)


@pytest.fixture(scope="session")
def fs2_unit():
    return fubini_study_chart(2).rescaled(0.25)


@pytest.fixture(scope="session")
def flat11():
    return flat_kahler_chart(1, 1)


@pytest.fixture(scope="session")
def flat10():
    return flat_kahler_chart(1, 0)


@pytest.fixture(scope="session")
def height1():
    return cpn_height_function(1, 0)


@pytest.fixture(scope="session")
def height2():
    return cpn_height_function(2, 0)


def points_on(chart, count, seed=11, radius=None):
    if radius is None:
        radius = 0.7 * chart.domain_radius
    return sample_points(chart, count, seed, radius)

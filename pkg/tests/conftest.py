import pytest
from mpmath import mp, mpf


def approx_rel(value, reference, rel):
    """|value - reference| <= rel * |reference| (absolute when reference = 0)."""
    value, reference = mpf(value), mpf(reference)
    if reference == 0:
        return abs(value) <= mpf(rel)
    return abs(value - reference) <= mpf(rel) * abs(reference)


def approx_abs(value, reference, tol):
    return abs(mpf(value) - mpf(reference)) <= mpf(tol)


@pytest.fixture(autouse=True)
def _restore_dps():
    saved = mp.dps
    yield
    mp.dps = saved

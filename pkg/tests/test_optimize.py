import pytest
from mpmath import mpf

from optrr import minimize_2d, minimize_scalar, workdps
from optrr.optimize import NoMinimumError, golden_section
from conftest import approx_abs


def test_parabola():
    with workdps(30):
        x, fx = minimize_scalar(lambda t: (t - 2) ** 2, (0, 5), mpf("1e-15"))
        assert approx_abs(x, 2, mpf("1e-13"))


def _bisect_cubic_root():
    # positive root of x^3 - x - 3 = 0, independent of the minimizer under test
    lo, hi = mpf(1), mpf(2)
    for _ in range(200):
        mid = (lo + hi) / 2
        if mid ** 3 - mid - 3 > 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def test_single_mode_trace_profile():
    # Omega/4 + 1/(4 Omega) + 3/(8 Omega^2): stationarity is the cubic above
    with workdps(40):
        root = _bisect_cubic_root()
        x, _ = minimize_scalar(lambda w: w / 4 + 1 / (4 * w) + 3 / (8 * w * w),
                               (mpf("0.1"), 10), mpf("1e-16"))
        assert approx_abs(x, root, mpf("1e-13"))


def test_balanced_profile_min_at_one():
    with workdps(30):
        x, _ = minimize_scalar(lambda w: w / 2 + 1 / (2 * w), (mpf("0.1"), 10), mpf("1e-15"))
        assert approx_abs(x, 1, mpf("1e-13"))


def test_bracket_expansion():
    with workdps(30):
        x, _ = minimize_scalar(lambda t: (t - 40) ** 2, (mpf("0.5"), 2), mpf("1e-12"))
        assert approx_abs(x, 40, mpf("1e-10"))


def test_hard_lower_bound_pins():
    with workdps(30):
        with pytest.raises(NoMinimumError):
            minimize_scalar(lambda t: t, (mpf(1), mpf(4)), mpf("1e-12"), hard_lo=mpf(1))


def test_golden_section_interval():
    with workdps(30):
        x, _ = golden_section(lambda t: (t - mpf("1.25")) ** 2, 0, 3, mpf("1e-20"))
        assert approx_abs(x, mpf("1.25"), mpf("1e-18"))


def test_minimize_2d_quadratic():
    with workdps(30):
        res = minimize_2d(lambda x, y: (x - 2) ** 2 + (y - 4) ** 2,
                          (1, 1), ((mpf("0.01"), 10), (mpf("0.01"), 10)), mpf("1e-13"))
        assert approx_abs(res.x, 2, mpf("1e-10"))
        assert approx_abs(res.y, 4, mpf("1e-10"))
        assert not res.boundary_pinned


def test_minimize_2d_boundary_flag():
    with workdps(30):
        res = minimize_2d(lambda x, y: x + y, (2, 2), ((1, 8), (1, 8)), mpf("1e-12"))
        assert res.boundary_pinned

"""Working-precision contract and exact-coefficient handling.

Every public routine in the package accepts either a digit count or a
:class:`PrecisionConfig` and performs its arithmetic with mpmath at that
many decimal digits.  Coefficients may be given as exact objects (int,
Fraction, decimal string, or a zero-argument callable) so that rebuilding
a Hamiltonian at 250 digits does not inherit double-precision roundoff.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf

DEFAULT_DIGITS = 30


class PrecisionError(ValueError):
    pass


@dataclass(frozen=True)
class PrecisionConfig:
    """Decimal working precision; tolerances are derived from it."""

    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < 15:
            raise PrecisionError(f"digits must be an integer >= 15, got {self.digits!r}")

    @property
    def convergence_tol(self):
        """10^-(digits-6), evaluated at the working precision."""
        with workdps(self):
            return mpf(10) ** (-(self.digits - 6))

    def scaled(self, factor: int) -> "PrecisionConfig":
        return PrecisionConfig(self.digits * factor)


def coerce(precision) -> PrecisionConfig:
    if precision is None:
        return PrecisionConfig()
    if isinstance(precision, PrecisionConfig):
        return precision
    return PrecisionConfig(int(precision))


@contextlib.contextmanager
def workdps(precision):
    """Context manager running its body at the configured decimal precision."""
    cfg = coerce(precision)
    with mp.workdps(cfg.digits):
        yield cfg


def as_mpf(value):
    """Convert a coefficient to mpf at the current working precision.

    Callables are invoked with no arguments (for surds like sqrt(2) that
    must be re-evaluated per precision); Fractions divide exactly;
    strings parse as decimal literals.
    """
    if callable(value):
        value = value()
    if isinstance(value, Fraction):
        return mpf(value.numerator) / mpf(value.denominator)
    if isinstance(value, (int, str)):
        return mpf(value)
    return mpf(value)

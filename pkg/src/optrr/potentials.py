"""Potential descriptions: finite lists of (power, coefficient) terms.

The quadratic term is stored like any other; the kinetic operator is
kinetic_scale * (-1/2 d^2/dx^2) (plus the centrifugal barrier folded in by
the radial assembly), so conventions without the customary 1/2 factors are
expressed through kinetic_scale alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mpf, sqrt

from .precision import as_mpf

PARITIES = ("even", "odd", "full")


class PotentialError(ValueError):
    pass


@dataclass(frozen=True)
class Potential:
    """Symbolic potential: V = sum of c_k * x^k (1D) or c_k * r^k (radial)."""

    kind: str                      # "1d" | "radial"
    terms: tuple                   # ((power, coeff), ...) coeff may be exact/callable
    parity: str = "even"           # 1d only
    l: int = 0                     # radial only
    kinetic_scale: object = 1      # g in g * (-1/2 d^2/dx^2)

    def __post_init__(self):
        if self.kind not in ("1d", "radial"):
            raise PotentialError(f"unknown kind {self.kind!r}")
        if self.kind == "1d":
            if self.parity not in PARITIES:
                raise PotentialError(f"parity must be one of {PARITIES}")
            for k, _ in self.terms:
                if k != int(k) or k < 0:
                    raise PotentialError("1D terms must have nonnegative integer powers")
        else:
            if self.l < 0 or self.l != int(self.l):
                raise PotentialError("l must be a nonnegative integer")
        powers = [mpf(k) for k, _ in self.terms]
        if len(set(powers)) != len(powers):
            raise PotentialError("term powers must be distinct")

    def realized_terms(self):
        """Terms as (mpf power, mpf coefficient) at the current precision."""
        return tuple((mpf(k), as_mpf(c)) for k, c in self.terms)

    def quadratic_coefficient(self):
        for k, c in self.realized_terms():
            if k == 2:
                return c
        return mpf(0)

    def omega_sq(self):
        """Harmonic frequency squared implied by the r^2 term and kinetic scale."""
        return 2 * self.quadratic_coefficient() / as_mpf(self.kinetic_scale)

    def negative_powers(self):
        return tuple(k for k, _ in self.realized_terms() if k < 0)

    def gamma_lower_bound(self, include_centrifugal_coupling=True):
        """Smallest admissible gamma for the radial basis (exclusive bound)."""
        bound = mpf(0)
        if include_centrifugal_coupling:
            bound = mpf(1)  # 1/r^2 coupling present unless gamma = l + 3/2 exactly
        for k in self.negative_powers():
            bound = max(bound, -k / 2)
        return bound


def quartic(omega_sq=1, lam=Fraction(1, 2), parity="even"):
    """1D quartic oscillator: omega^2/2 x^2 + lam x^4."""
    return Potential("1d", ((2, _half(omega_sq)), (4, lam)), parity=parity)


def sextic_1d(omega_sq, lam=1, parity="even"):
    """1D sextic oscillator: omega^2/2 x^2 + lam x^6."""
    return Potential("1d", ((2, _half(omega_sq)), (6, lam)), parity=parity)


def sextic_1d_qes(p, nu=0, lam=1):
    """1D sextic tuned so the lowest p+1 states of parity nu are closed-form."""
    def omega_sq():
        return -(3 + 4 * p + 2 * nu) * sqrt(2 * as_mpf(lam))
    parity = "even" if nu == 0 else "odd"
    return sextic_1d(omega_sq, lam, parity=parity)


def double_well(g):
    """Symmetric quartic double well: g*(-1/2 d^2/dx^2) + (x^2 - 1/4)^2 / (2g)."""
    def c4():
        return 1 / (2 * as_mpf(g))

    def c2():
        return -1 / (4 * as_mpf(g))

    def c0():
        return 1 / (32 * as_mpf(g))
    return Potential("1d", ((4, c4), (2, c2), (0, c0)), parity="full", kinetic_scale=g)


def radial_oscillator(omega_sq, lam, k, l=0):
    """Radial omega^2/2 r^2 + lam r^k at angular momentum l."""
    return Potential("radial", ((2, _half(omega_sq)), (mpf(k), lam)), l=l)


def radial_sextic_qes(p, l=0, lam=1):
    """Radial sextic tuned so the lowest p+1 states at this l are closed-form."""
    def omega_sq():
        return -(5 + 4 * p + 2 * l) * sqrt(2 * as_mpf(lam))
    return radial_oscillator(omega_sq, lam, 6, l=l)


def harmonium(omega, lam=1, l=0):
    """Relative motion of two harmonically trapped Coulomb-repelling particles:
    -d^2/dr^2 + l(l+1)/r^2 + omega^2 r^2 + lam/r (no 1/2 factors)."""
    def c2():
        w = as_mpf(omega)
        return w * w
    return Potential("radial", ((2, c2), (-1, lam)), l=l, kinetic_scale=2)


def spiked(lam, omega=1, l=0, k=-6):
    """Spiked radial oscillator: omega^2/2 r^2 + lam r^k with k < -2."""
    if mpf(k) >= -2:
        raise PotentialError("spiked oscillator requires k < -2")
    def c2():
        w = as_mpf(omega)
        return w * w / 2
    return Potential("radial", ((2, c2), (mpf(k), lam)), l=l)


def power_mix(s, t, cs=1, ct=1, l=0):
    """Generalized radial oscillator: cs r^s + ct r^t (s < 0 < t)."""
    return Potential("radial", ((mpf(s), cs), (mpf(t), ct)), l=l)


def _half(value):
    def half():
        return as_mpf(value) / 2
    return half

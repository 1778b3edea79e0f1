"""Exact operator matrices and Hamiltonian assembly in the two bases.

1D: harmonic-oscillator eigenfunctions of adjustable frequency.  Powers of
the position operator are built from the tridiagonal ladder matrix raised to
the k-th power in a padded dimension, which makes the retained block exact.

Radial: pseudoharmonic-oscillator eigenfunctions with parameters (Omega,
gamma); matrix elements of r^k come from closed-form Gamma-ratio sums (signs
pinned against the quadrature oracle in the tests).  Assembly removes the
Omega dependence from the matrix elements by rescaling the coordinate, so a
single set of unit-frequency matrices serves every Omega.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import gamma as gamma_fn
from mpmath import factorial, mp, mpf, sqrt

from .linalg import SymMatrix
from .potentials import Potential, PotentialError
from .precision import as_mpf, coerce, workdps

GAMMA_POLE_OFFSET = mpf("1e-6")


class BasisError(ValueError):
    pass


class GammaBoundError(BasisError):
    pass


@dataclass(frozen=True)
class BasisSpec:
    """Basis family, truncation size and nonlinear parameters."""

    family: str                 # "ho1d" | "pho"
    size: int
    omega: object = 1
    gamma: object = None        # pho only
    parity: str = "even"        # ho1d only

    def __post_init__(self):
        if self.family not in ("ho1d", "pho"):
            raise BasisError(f"unknown family {self.family!r}")
        if self.size < 1:
            raise BasisError("size must be >= 1")
        if self.family == "pho" and self.gamma is None:
            raise BasisError("pho basis requires gamma")


@dataclass(frozen=True)
class OperatorMatrix:
    """Matrix of x^k or r^k in the unit-frequency basis; rescale by
    omega**(-k/2) to obtain the matrix in the Omega basis."""

    basis: BasisSpec
    power: object
    entries: SymMatrix


def sector_indices(n, parity):
    if parity == "even":
        return [2 * i for i in range(n)]
    if parity == "odd":
        return [2 * i + 1 for i in range(n)]
    return list(range(n))


# ---------------------------------------------------------------- 1D ladder

_X_POWER_CACHE = {}


def _ladder_rows(m):
    rows = [[mpf(0)] * m for _ in range(m)]
    for n in range(m - 1):
        rows[n][n + 1] = rows[n + 1][n] = sqrt(mpf(n + 1) / 2)
    return rows


def _banded_power(m, k):
    """Rows of X^k in dimension m, multiplying within the growing band."""
    x = _ladder_rows(m)
    out = x
    band = 1
    for _ in range(k - 1):
        nxt = [[mpf(0)] * m for _ in range(m)]
        for i in range(m):
            lo = max(0, i - band - 1)
            hi = min(m, i + band + 2)
            row_out = nxt[i]
            row_a = out[i]
            for j in range(lo, hi):
                s = mpf(0)
                for t in range(max(0, i - band, j - 1), min(m, i + band + 1, j + 2)):
                    s += row_a[t] * x[t][j]
                row_out[j] = s
        out = nxt
        band += 1
    return out


def _x_power_rows(m, k):
    key = (m, k, mp.prec)
    rows = _X_POWER_CACHE.get(key)
    if rows is None:
        rows = _banded_power(m, k) if k >= 1 else [[mpf(1) if i == j else mpf(0) for j in range(m)] for i in range(m)]
        _X_POWER_CACHE[key] = rows
    return rows


def ho_power_matrix(n, k, parity="even", precision=None) -> OperatorMatrix:
    """Exact <m|x^k|n> block for the unit-frequency 1D basis.

    The ladder matrix is raised to the k-th power in a dimension padded by k
    beyond the largest retained index, then cut back, so every retained entry
    equals its infinite-dimensional value.
    """
    if k != int(k) or k < 0:
        raise BasisError("1D operator powers must be nonnegative integers")
    k = int(k)
    cfg = coerce(precision)
    with workdps(cfg):
        idx = sector_indices(n, parity)
        m = idx[-1] + k + 1
        rows = _x_power_rows(m, k)
        sub = SymMatrix.from_fn(n, lambda i, j: rows[idx[i]][idx[j]])
        return OperatorMatrix(BasisSpec("ho1d", n, parity=parity), k, sub)


def ho_power_diag(full_index, k, precision=None):
    """<n|x^k|n> for a single full-basis index (k even; zero for odd k)."""
    if k % 2 == 1:
        return mpf(0)
    cfg = coerce(precision)
    with workdps(cfg):
        m = full_index + k + 1
        return _x_power_rows(m, k)[full_index][full_index]


def ho_kinetic_diag(full_index):
    """<n|-1/2 d^2/dx^2|n> in the unit basis: (2n+1)/4."""
    return (2 * full_index + 1) / mpf(4)


def ho_kinetic_matrix(n, parity="even", precision=None) -> SymMatrix:
    """Kinetic matrix -1/2 d^2/dx^2 via the identity T = (n+1/2) I - x^2/2."""
    cfg = coerce(precision)
    with workdps(cfg):
        idx = sector_indices(n, parity)
        x2 = ho_power_matrix(n, 2, parity, cfg).entries

        def t_entry(i, j):
            val = -x2.get(i, j) / 2
            if i == j:
                val += idx[i] + mpf(1) / 2
            return val

        return SymMatrix.from_fn(n, t_entry)


def assemble_1d(potential: Potential, basis: BasisSpec, precision=None) -> SymMatrix:
    """H in the Omega-scaled 1D basis:
    kinetic_scale * Omega * T + sum_k c_k Omega^(-k/2) <x^k>."""
    if potential.kind != "1d":
        raise PotentialError("assemble_1d requires a 1D potential")
    if basis.family != "ho1d":
        raise BasisError("assemble_1d requires the 1D oscillator basis")
    if potential.parity != "full" and potential.parity != basis.parity:
        raise BasisError(
            f"basis parity {basis.parity!r} does not match potential sector {potential.parity!r}")
    cfg = coerce(precision)
    with workdps(cfg):
        n = basis.size
        omega = as_mpf(basis.omega)
        if omega <= 0:
            raise BasisError("Omega must be positive")
        g = as_mpf(potential.kinetic_scale)
        h = SymMatrix.zeros(n)
        h.scaled_add(ho_kinetic_matrix(n, basis.parity, cfg), g * omega)
        for k, c in potential.realized_terms():
            k = int(k)
            op = ho_power_matrix(n, k, basis.parity, cfg).entries
            h.scaled_add(op, c * omega ** (-mpf(k) / 2))
        return h


# ---------------------------------------------------------------- radial PHO

def _binom_general(a, b):
    """binomial(a, b) for integer b >= 0, real a, in falling-factorial form
    (no Gamma poles; exact zeros for integer a < b)."""
    out = mpf(1)
    for i in range(b):
        out *= (a - i)
        out /= (i + 1)
    return out


def check_gamma(gamma, powers, centrifugal_coupling=True):
    """Validate gamma against the singular-power bounds; gamma within
    1e-6 of a pole of the closed-form elements is rejected."""
    gamma = mpf(gamma)
    if gamma <= 0:
        raise GammaBoundError(f"gamma must be positive, got {gamma}")
    if centrifugal_coupling and gamma <= 1:
        raise GammaBoundError(f"gamma={gamma} <= 1 with a 1/r^2 coupling present")
    for k in powers:
        k = mpf(k)
        if k < 0 and gamma + k / 2 < GAMMA_POLE_OFFSET:
            raise GammaBoundError(
                f"gamma={gamma} within {GAMMA_POLE_OFFSET} of the r^{k} singular bound {-k/2}")
    return gamma


def _pho_sum(m, n, kk, gamma):
    """sum_j C(kk, m-j) C(kk, n-j) C(gamma+kk-1+j, j) over j <= min(m, n).

    For integer kk >= 0 the binomials vanish beyond kk and the sum is short;
    otherwise no factor ever vanishes and the terms follow the O(1) ratio
    t_{j+1}/t_j = (m-j)(n-j)(gamma+kk+j) / ((kk-m+j+1)(kk-n+j+1)(j+1)).
    """
    jmax = min(m, n)
    if kk == int(kk) and kk >= 0:
        s = mpf(0)
        for j in range(max(0, m - int(kk), n - int(kk)), jmax + 1):
            s += (_binom_general(kk, m - j) * _binom_general(kk, n - j)
                  * _binom_general(gamma + kk - 1 + j, j))
        return s
    term = _binom_general(kk, m) * _binom_general(kk, n)
    s = term
    for j in range(jmax):
        term *= (m - j) * (n - j) * (gamma + kk + j)
        term /= (kk - m + j + 1) * (kk - n + j + 1) * (j + 1)
        s += term
    return s


def pho_element(m, n, k, gamma):
    """<m|r^k|n> for the unit-frequency radial basis (closed form)."""
    kk = mpf(k) / 2
    gamma = mpf(gamma)
    pref = sqrt(factorial(m) * factorial(n) / (gamma_fn(gamma + m) * gamma_fn(gamma + n)))
    pref *= gamma_fn(gamma + kk)
    return pref * _pho_sum(m, n, kk, gamma)


def pho_power_matrix(n, k, gamma, precision=None) -> OperatorMatrix:
    """Exact <m|r^k|n> for the unit-frequency radial basis."""
    cfg = coerce(precision)
    with workdps(cfg):
        g = check_gamma(gamma, [k], centrifugal_coupling=False)
        k = mpf(k)
        if k == 0:
            ent = SymMatrix.from_fn(n, lambda i, j: mpf(1) if i == j else mpf(0))
        else:
            with mp.workdps(cfg.digits + 10):  # guard digits for the sum tails
                kk = k / 2
                g = +g
                fact = [mpf(1)]
                gam = [gamma_fn(g)]
                for i in range(1, n):
                    fact.append(fact[-1] * i)
                    gam.append(gam[-1] * (g + i - 1))
                gkk = gamma_fn(g + kk)

                def entry(i, j):
                    pref = sqrt(fact[i] * fact[j] / (gam[i] * gam[j])) * gkk
                    return pref * _pho_sum(i, j, kk, g)

                ent = SymMatrix.from_fn(n, entry)
        return OperatorMatrix(BasisSpec("pho", n, gamma=g), k, ent)


def pho_power_diag(n, k, gamma):
    """<n|r^k|n> closed form (k=2 reduces to 2n+gamma, k=-2 to 1/(gamma-1))."""
    kk = mpf(k) / 2
    gamma = mpf(gamma)
    pref = factorial(n) / gamma_fn(gamma + n) * gamma_fn(gamma + kk)
    return pref * _pho_sum(n, n, kk, gamma)


def pho_power_diag_sum(n_count, k, gamma):
    """sum over n < n_count of <n|r^k|n>, with shared factorial/Gamma
    recurrences (the trace optimizer's inner loop)."""
    kk = mpf(k) / 2
    gamma = mpf(gamma)
    gkk = gamma_fn(gamma + kk)
    fact = mpf(1)
    gam = gamma_fn(gamma)
    total = mpf(0)
    for n in range(n_count):
        if n:
            fact *= n
            gam *= gamma + n - 1
        total += fact / gam * _pho_sum(n, n, kk, gamma)
    return gkk * total


def centrifugal_strength(gamma, l):
    """Coefficient gamma^2 - 2*gamma + 3/4 - l(l+1) of the 1/r^2 coupling;
    vanishes exactly at gamma = l + 3/2."""
    gamma = mpf(gamma)
    return gamma * gamma - 2 * gamma + mpf(3) / 4 - l * (l + 1)


def radial_term_coefficients(potential: Potential, omega, gamma):
    """Per-operator coefficients of the radial Hamiltonian in the Omega basis.

    Returns (diag_factor, coef_r2, coef_inv_r2, [(k, coef_k), ...]) such that
    H = diag_factor*(2n+gamma) delta + coef_r2 <r^2> + coef_inv_r2 <1/r^2>
        + sum coef_k <r^k>.
    """
    omega = as_mpf(omega)
    gamma = mpf(gamma)
    s_t = as_mpf(potential.kinetic_scale)
    c2 = mpf(0)
    rest = []
    for k, c in potential.realized_terms():
        if k == 2:
            c2 += c
        else:
            rest.append((k, c))
    diag_factor = s_t * omega
    coef_r2 = c2 / omega - s_t * omega / 2
    coef_inv_r2 = -(s_t * omega / 2) * centrifugal_strength(gamma, potential.l)
    others = [(k, c * omega ** (-k / 2)) for k, c in rest]
    return diag_factor, coef_r2, coef_inv_r2, others


def assemble_radial(potential: Potential, basis: BasisSpec, precision=None) -> SymMatrix:
    """Radial Hamiltonian in the Omega-scaled basis (coordinate rescaling
    removes Omega from the matrix elements):
    H_mn = s*(2n+gamma)*Omega delta_mn + (c2/Omega - s*Omega/2) <m|r^2|n>
           - (s*Omega/2)(gamma^2-2gamma+3/4-l(l+1)) <m|1/r^2|n>
           + sum_k c_k Omega^(-k/2) <m|r^k|n>,  s = kinetic_scale.
    A missing quadratic term simply means omega = 0."""
    if potential.kind != "radial":
        raise PotentialError("assemble_radial requires a radial potential")
    if basis.family != "pho":
        raise BasisError("assemble_radial requires the radial basis")
    cfg = coerce(precision)
    with workdps(cfg):
        n = basis.size
        omega = as_mpf(basis.omega)
        if omega <= 0:
            raise BasisError("Omega must be positive")
        gamma = mpf(as_mpf(basis.gamma))
        diag_factor, coef_r2, coef_inv_r2, others = radial_term_coefficients(
            potential, omega, gamma)
        needs_inv_r2 = coef_inv_r2 != 0
        check_gamma(gamma, [k for k, _ in others], centrifugal_coupling=needs_inv_r2)
        h = SymMatrix.zeros(n)
        for i in range(n):
            h.set(i, i, diag_factor * (2 * i + gamma))
        h.scaled_add(pho_power_matrix(n, 2, gamma, cfg).entries, coef_r2)
        if needs_inv_r2:
            h.scaled_add(pho_power_matrix(n, -2, gamma, cfg).entries, coef_inv_r2)
        for k, c in others:
            h.scaled_add(pho_power_matrix(n, k, gamma, cfg).entries, c)
        return h


def assemble(potential: Potential, basis: BasisSpec, precision=None) -> SymMatrix:
    if potential.kind == "1d":
        return assemble_1d(potential, basis, precision)
    return assemble_radial(potential, basis, precision)

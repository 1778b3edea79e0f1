"""Closed-form bound states of the four quasi-solvable oscillator families.

Each family admits eigenfunctions of the form f(y) * sum a_n y^n whose
coefficients obey a three-term recurrence A_n a_{n+1} + B_n a_n + C_n a_{n-1}
= 0.  Termination after the p-th term requires C_{p+1} = 0 (an algebraic
constraint on the potential) together with the vanishing of a tridiagonal
determinant, a polynomial condition solved here by continuant sign-scan and
bisection.  The resulting energies, coefficient vectors, normalized
wavefunctions and their moments serve as independent references for the
variational pipeline.

The Gaussian-quartic exponent is exp(-sqrt(2 lam) x^4 / 4) (and the radial
analogue): the coupling-dependent form required for the x^6 coefficient to
match, confirmed for general lam by residual_check.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import exp, mp, mpf, sqrt

from .potentials import Potential, harmonium, radial_sextic_qes, sextic_1d_qes, spiked
from .precision import as_mpf, coerce, workdps
from .quadrature import FULL_LINE, HALF_LINE, integrate
from .rootfind import continuant_det, continuant_scale, poly_roots_real


class QESError(RuntimeError):
    pass


class TerminationError(QESError):
    """Recurrence did not terminate: a_{p+1} exceeds its tolerance."""


@dataclass(frozen=True)
class Sextic1D:
    """1D sextic family: p+1 closed-form states of parity nu when
    omega^2 = -(3+4p+2nu) sqrt(2 lam)."""

    p: int
    nu: int = 0
    lam: object = 1

    def __post_init__(self):
        if self.p < 0 or self.nu not in (0, 1):
            raise QESError("require p >= 0 and nu in {0, 1}")


@dataclass(frozen=True)
class SexticRadial:
    """Radial sextic family: p+1 closed-form states at angular momentum l
    when omega^2 = -(5+4p+2l) sqrt(2 lam)."""

    p: int
    l: int = 0
    lam: object = 1

    def __post_init__(self):
        if self.p < 0 or self.l < 0:
            raise QESError("require p >= 0 and l >= 0")


@dataclass(frozen=True)
class Harmonium:
    """Coulomb-in-a-trap family: one closed-form state per positive root
    omega_p of the determinant, with E = (3+2l+2p) omega_p (lam = 1)."""

    p: int
    l: int = 0
    lam: object = 1

    def __post_init__(self):
        if self.p < 0 or self.l < 0:
            raise QESError("require p >= 0 and l >= 0")


@dataclass(frozen=True)
class Spiked:
    """Repulsive 1/r^6 family at unit frequency: p+1 couplings lam_{p(i)}
    share the energy E = 2(p+1) omega; the i-th (descending in lam)
    represents the i-th excitation.  Only l = 0 is supported: the closed-form
    prefactor r^(3/2) does not carry l."""

    p: int
    l: int = 0
    omega: object = 1

    def __post_init__(self):
        if self.p < 0:
            raise QESError("require p >= 0")
        if self.l != 0:
            raise QESError("spiked closed forms are only available for l = 0")


@dataclass(frozen=True)
class QESSolution:
    """Closed-form energies for one resolved potential.

    Sextic families carry all p+1 states; the Coulomb and spiked families
    carry a single state per parameter root (stored in `parameter`).
    """

    family: object
    potential: Potential
    energies: tuple
    coeff_vectors: tuple     # raw a_0..a_p per energy, a_0 = 1
    state_index: tuple       # excitation label of each state in its sector
    parameter: object = None # omega_p (Coulomb) or lam_{p(i)} (spiked)


@dataclass(frozen=True)
class ExactState:
    """Normalized closed-form eigenstate with analytic derivatives."""

    family: object
    potential: Potential
    energy: object
    coeffs: tuple            # normalized series coefficients
    monomials: tuple         # (exponent, coefficient) of the polynomial factor
    state_index: int
    domain: tuple

    def __call__(self, x):
        return self._poly(x) * self._gauss(x)

    def _poly(self, x):
        return sum(c * x ** e for e, c in self.monomials)

    def _gauss(self, x):
        return exp(-self._w(x))

    def _w(self, x):
        raise NotImplementedError

    def second_derivative(self, x):
        """psi'' from psi = e^{-W} Q: e^{-W} (Q'' - 2 W' Q' + (W'^2 - W'') Q)."""
        q = self._poly(x)
        q1 = sum(c * e * x ** (e - 1) for e, c in self.monomials if e != 0)
        q2 = sum(c * e * (e - 1) * x ** (e - 2) for e, c in self.monomials
                 if e not in (0, 1))
        w1, w2 = self._w_derivs(x)
        return self._gauss(x) * (q2 - 2 * w1 * q1 + (w1 * w1 - w2) * q)

    def _w_derivs(self, x):
        raise NotImplementedError

    def hamiltonian_apply(self, x):
        """(H psi)(x) with H = kinetic_scale*(-1/2 d^2) + centrifugal + V."""
        pot = self.potential
        s_t = as_mpf(pot.kinetic_scale)
        val = -s_t / 2 * self.second_derivative(x)
        psi = self(x)
        if pot.kind == "radial" and pot.l > 0:
            val += s_t * pot.l * (pot.l + 1) / (2 * x * x) * psi
        for k, c in pot.realized_terms():
            val += c * x ** k * psi
        return val


@dataclass(frozen=True)
class _QuarticExpState(ExactState):
    beta: object = None      # exponent: W = beta x^4

    def _w(self, x):
        return self.beta * x ** 4

    def _w_derivs(self, x):
        return 4 * self.beta * x ** 3, 12 * self.beta * x * x


@dataclass(frozen=True)
class _GaussExpState(ExactState):
    half_omega: object = None  # W = (omega/2) r^2

    def _w(self, x):
        return self.half_omega * x * x

    def _w_derivs(self, x):
        return 2 * self.half_omega * x, 2 * self.half_omega


@dataclass(frozen=True)
class _SpikedExpState(ExactState):
    s: object = None           # W = s/(2 r^2) + (omega/2) r^2
    half_omega: object = None

    def _w(self, x):
        return self.s / (2 * x * x) + self.half_omega * x * x

    def _w_derivs(self, x):
        w1 = -self.s / x ** 3 + 2 * self.half_omega * x
        w2 = 3 * self.s / x ** 4 + 2 * self.half_omega
        return w1, w2


# ------------------------------------------------------- recurrences

def recurrence_coeffs(family, energy, n, *, omega=None, lam=None):
    """(A_n, B_n, C_n) of the three-term recurrence for the family.

    The Coulomb family needs the trap frequency omega; the spiked family
    needs the coupling lam (both are the quantities being solved for when
    extracting closed-form cases)."""
    e = as_mpf(energy)
    if isinstance(family, Sextic1D):
        s2l = sqrt(2 * as_mpf(family.lam))
        nu = family.nu
        a = mpf((2 * n + 2 + nu) * (2 * n + 1 + nu))
        b = 2 * e
        c = -_sextic1d_omega_sq(family) - (4 * n - 1 + 2 * nu) * s2l
        return a, b, c
    if isinstance(family, SexticRadial):
        s2l = sqrt(2 * as_mpf(family.lam))
        a = mpf(2 * (n + 1) * (3 + 2 * n + 2 * family.l))
        b = 2 * e
        c = -_sextic_radial_omega_sq(family) - (1 + 4 * n + 2 * family.l) * s2l
        return a, b, c
    if isinstance(family, Harmonium):
        if omega is None:
            raise QESError("Coulomb-family coefficients require omega")
        w = as_mpf(omega)
        a = mpf((n + 1) * (n + 2 * family.l + 2))
        b = -as_mpf(family.lam)
        c = e - (1 + 2 * n + 2 * family.l) * w
        return a, b, c
    if isinstance(family, Spiked):
        if lam is None:
            raise QESError("spiked-family coefficients require lam")
        s = sqrt(2 * as_mpf(lam))
        w = as_mpf(family.omega)
        a = -4 * s * (n + 1)
        b = -mpf(3) / 4 - 4 * n * (1 + n) + family.l * (family.l + 1) + 2 * s * w
        c = -2 * (e - 2 * n * w)
        return a, b, c
    raise QESError(f"unknown family {family!r}")


def _sextic1d_omega_sq(family: Sextic1D):
    return -(3 + 4 * family.p + 2 * family.nu) * sqrt(2 * as_mpf(family.lam))


def _sextic_radial_omega_sq(family: SexticRadial):
    return -(5 + 4 * family.p + 2 * family.l) * sqrt(2 * as_mpf(family.lam))


def solvability_condition(family, omega=None):
    """The C_{p+1} = 0 constraint.

    Sextic families: returns the required omega^2.  Coulomb / spiked
    families: returns the closed-form energy for the given trap frequency
    (E = (3+2l+2p) omega and E = 2(p+1) omega respectively)."""
    if isinstance(family, Sextic1D):
        return _sextic1d_omega_sq(family)
    if isinstance(family, SexticRadial):
        return _sextic_radial_omega_sq(family)
    if isinstance(family, Harmonium):
        w = as_mpf(omega if omega is not None else 1)
        return (3 + 2 * family.l + 2 * family.p) * w
    if isinstance(family, Spiked):
        w = as_mpf(omega if omega is not None else family.omega)
        return 2 * (family.p + 1) * w
    raise QESError(f"unknown family {family!r}")


def _determinant(family, energy, *, omega=None, lam=None, scale=False):
    p = family.p
    coeffs = [recurrence_coeffs(family, energy, n, omega=omega, lam=lam)
              for n in range(p + 1)]
    a = [c[0] for c in coeffs]
    b = [c[1] for c in coeffs]
    c = [c[2] for c in coeffs]
    if scale:
        return continuant_scale(a, b, c, p)
    return continuant_det(a, b, c, p)


def determinant(family, energy, *, omega=None, lam=None):
    """The termination determinant whose roots select the closed-form cases."""
    return _determinant(family, energy, omega=omega, lam=lam)


def _series_coeffs(family, energy, p, *, omega=None, lam=None):
    a_coeffs = [mpf(1)]
    prev = mpf(0)
    for n in range(p + 1):
        an, bn, cn = recurrence_coeffs(family, energy, n, omega=omega, lam=lam)
        nxt = -(bn * a_coeffs[n] + cn * prev) / an
        prev = a_coeffs[n]
        a_coeffs.append(nxt)
    tail = a_coeffs.pop()
    scale = max(abs(x) for x in a_coeffs)
    if abs(tail) > mpf("1e-10") * scale:
        raise TerminationError(
            f"series tail a_{p+1} = {tail} exceeds 1e-10 * {scale}")
    return tuple(a_coeffs)


# ------------------------------------------------------- energies

def exact_energies(family, precision=None):
    """All closed-form solutions of the family, as a tuple of QESSolution.

    Sextic families yield a single solution holding p+1 energies (ascending;
    these are the lowest p+1 states of the sector).  The Coulomb family
    yields one solution per positive frequency root; the spiked family one
    per coupling root, ordered by descending coupling and tagged with the
    excitation index it represents."""
    cfg = coerce(precision)
    with workdps(cfg):
        if isinstance(family, (Sextic1D, SexticRadial)):
            return (_sextic_solution(family, cfg),)
        if isinstance(family, Harmonium):
            return _harmonium_solutions(family, cfg)
        if isinstance(family, Spiked):
            return _spiked_solutions(family, cfg)
        raise QESError(f"unknown family {family!r}")


def _sextic_solution(family, cfg):
    p = family.p
    # Gershgorin bound via the sign-symmetrized tridiagonal equivalent
    bs = []
    for n in range(p):
        an, _, _ = recurrence_coeffs(family, 0, n)
        _, _, cn1 = recurrence_coeffs(family, 0, n + 1)
        bs.append(sqrt(an * cn1))
    if bs:
        radius = max(bs[0], bs[-1], *(bs[i] + bs[i + 1] for i in range(len(bs) - 1))) / 2 + 1
    else:
        radius = mpf(1)
    scan = poly_roots_real(lambda e: determinant(family, e),
                           (-radius, radius), count_hint=p + 1, precision=cfg,
                           samples=max(512, 128 * (p + 1)))
    if len(scan.roots) != p + 1:
        raise QESError(
            f"expected {p + 1} determinant roots, found {len(scan.roots)}; "
            "family constraint violated?")
    energies = scan.roots
    coeffs = tuple(_series_coeffs(family, e, p) for e in energies)
    if isinstance(family, Sextic1D):
        pot = sextic_1d_qes(family.p, family.nu, family.lam)
    else:
        pot = radial_sextic_qes(family.p, family.l, family.lam)
    return QESSolution(family, pot, energies, coeffs, tuple(range(p + 1)))


def _log_roots(f, lo, hi, count_hint, cfg, samples):
    """Roots of f on (lo, hi), scanned uniformly in log scale."""
    u_lo, u_hi = mp.log(lo), mp.log(hi)
    scan = poly_roots_real(lambda u: f(exp(u)), (u_lo, u_hi),
                           count_hint=count_hint, precision=cfg, samples=samples)
    return tuple(exp(u) for u in scan.roots)


def _harmonium_solutions(family, cfg):
    p, l = family.p, family.l
    lam = as_mpf(family.lam)
    factor = 3 + 2 * l + 2 * p

    def det_of_omega(w):
        return determinant(family, factor * w, omega=w)

    hi = 4 * lam * lam + 2
    roots = _log_roots(det_of_omega, mpf(10) ** -10 * max(1, lam * lam), hi,
                       None, cfg, samples=4096)
    solutions = []
    for w in roots:
        energy = factor * w
        coeffs = _series_coeffs(family, energy, p, omega=w)
        pot = harmonium(w, lam, l)
        label = _count_positive_roots(coeffs)
        solutions.append(QESSolution(family, pot, (energy,), (coeffs,),
                                     (label,), parameter=w))
    return tuple(solutions)


def _spiked_solutions(family, cfg):
    p = family.p
    w = as_mpf(family.omega)
    energy = 2 * (p + 1) * w

    def det_of_s(s):
        return determinant(family, energy, lam=s * s / 2)

    beta_max = max(mpf(3) / 4 + 4 * n * (1 + n) for n in range(p + 1))
    c_off = 8 * max((sqrt(mpf((n + 1) * (p - n))) for n in range(p)), default=mpf(0))
    s_max = ((c_off + sqrt(c_off * c_off + 4 * (beta_max + 2 * w))) / 2) ** 2 + beta_max + 2
    roots = _log_roots(det_of_s, mpf(10) ** -8, s_max, p + 1, cfg, samples=4096)
    if len(roots) != p + 1:
        raise QESError(
            f"expected {p + 1} coupling roots, found {len(roots)}")
    lams = sorted((s * s / 2 for s in roots), reverse=True)
    solutions = []
    for i, lam in enumerate(lams):
        coeffs = _series_coeffs(family, energy, p, lam=lam)
        pot = spiked(lam, w, family.l)
        solutions.append(QESSolution(family, pot, (energy,), (coeffs,),
                                     (i,), parameter=lam))
    return tuple(solutions)


def _count_positive_roots(coeffs, samples=4096):
    """Sign changes of sum a_n r^n on r > 0 (number of radial nodes)."""
    bound = 1 + max(abs(c) for c in coeffs) / abs(coeffs[-1]) if coeffs[-1] else mpf(10)
    lo = mpf(10) ** -8
    step = (mp.log(bound) - mp.log(lo)) / samples
    changes = 0
    prev = None
    for i in range(samples + 1):
        r = exp(mp.log(lo) + step * i)
        v = sum(c * r ** n for n, c in enumerate(coeffs))
        sgn = 1 if v > 0 else (-1 if v < 0 else 0)
        if prev is not None and sgn != 0 and prev != 0 and sgn != prev:
            changes += 1
        if sgn != 0:
            prev = sgn
    return changes


# ------------------------------------------------------- wavefunctions

def exact_state(solution: QESSolution, index=0, precision=None) -> ExactState:
    """Normalized closed-form eigenstate for one energy of a solution."""
    cfg = coerce(precision)
    with workdps(cfg):
        family = solution.family
        energy = solution.energies[index]
        raw = solution.coeff_vectors[index]
        state = _build_state(family, solution, energy, raw)
        norm_sq = integrate(lambda x: state(x) ** 2, state.domain, cfg)
        scale = 1 / sqrt(norm_sq)
        monomials = tuple((e, c * scale) for e, c in state.monomials)
        coeffs = tuple(c * scale for c in state.coeffs)
        return type(state)(**{**_state_kwargs(state),
                              "coeffs": coeffs, "monomials": monomials})


def _state_kwargs(state: ExactState):
    return {f: getattr(state, f) for f in state.__dataclass_fields__}


def _build_state(family, solution, energy, raw):
    if isinstance(family, Sextic1D):
        beta = sqrt(2 * as_mpf(family.lam)) / 4
        monomials = tuple((mpf(2 * n + family.nu), c) for n, c in enumerate(raw))
        return _QuarticExpState(family, solution.potential, energy, tuple(raw),
                                monomials, solution.state_index[0], FULL_LINE,
                                beta=beta)
    if isinstance(family, SexticRadial):
        beta = sqrt(2 * as_mpf(family.lam)) / 4
        monomials = tuple((mpf(2 * n + family.l + 1), c) for n, c in enumerate(raw))
        return _QuarticExpState(family, solution.potential, energy, tuple(raw),
                                monomials, solution.state_index[0], HALF_LINE,
                                beta=beta)
    if isinstance(family, Harmonium):
        w = solution.parameter
        monomials = tuple((mpf(n + family.l + 1), c) for n, c in enumerate(raw))
        return _GaussExpState(family, solution.potential, energy, tuple(raw),
                              monomials, solution.state_index[0], HALF_LINE,
                              half_omega=w / 2)
    if isinstance(family, Spiked):
        s = sqrt(2 * solution.parameter)
        monomials = tuple((mpf(2 * n) + mpf(3) / 2, c) for n, c in enumerate(raw))
        return _SpikedExpState(family, solution.potential, energy, tuple(raw),
                               monomials, solution.state_index[0], HALF_LINE,
                               s=s, half_omega=as_mpf(family.omega) / 2)
    raise QESError(f"unknown family {family!r}")


def exact_wavefunction(family, energy, precision=None) -> ExactState:
    """Normalized state of the family whose energy is closest to `energy`."""
    cfg = coerce(precision)
    with workdps(cfg):
        best = None
        for solution in exact_energies(family, cfg):
            for i, e in enumerate(solution.energies):
                gap = abs(e - as_mpf(energy))
                if best is None or gap < best[0]:
                    best = (gap, solution, i)
        if best is None:
            raise QESError("family has no closed-form states")
        return exact_state(best[1], best[2], cfg)


def exact_moments(state: ExactState, powers, precision=None):
    """Quadrature moments <x^k> of the normalized closed-form state."""
    cfg = coerce(precision)
    with workdps(cfg):
        out = {}
        for k in powers:
            k = mpf(k)
            out[k] = integrate(lambda x: state(x) ** 2 * x ** k, state.domain, cfg)
        return out


def residual_check(state: ExactState, precision=None, energy=None):
    """||(H - E) psi|| / ||psi|| over the state's domain (L2, by quadrature
    with the analytic second derivative)."""
    cfg = coerce(precision)
    with workdps(cfg):
        e = as_mpf(energy if energy is not None else state.energy)

        def defect_sq(x):
            d = state.hamiltonian_apply(x) - e * state(x)
            return d * d

        num = integrate(defect_sq, state.domain, cfg)
        den = integrate(lambda x: state(x) ** 2, state.domain, cfg)
        return sqrt(num / den)

"""End-to-end pipeline: assemble, fix parameters by the trace condition,
diagonalize, extract energies, moments and convergence metrics."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from mpmath import mpf

from .basis import BasisSpec, assemble, ho_power_matrix, pho_power_matrix
from .linalg import eigh
from .potentials import Potential, double_well
from .precision import as_mpf, coerce, workdps
from .traceopt import (OptimizedParams, TraceObjective, optimize,
                       strategy_presets, trace_value)


class SolverError(RuntimeError):
    pass


class SplittingUnresolved(SolverError):
    """Level splitting below the arithmetic resolution of the run."""


@dataclass(frozen=True)
class SpectralResult:
    """Optimized-basis eigenvalues and eigenvectors of one truncated solve."""

    potential: Potential
    basis: BasisSpec
    params: OptimizedParams
    energies: tuple
    vectors: tuple
    digits: int

    @property
    def n(self):
        return self.basis.size

    @property
    def trusted_count(self):
        """Only the lowest ceil(N/2) states count as converged candidates."""
        return (self.n + 1) // 2

    def energy(self, state):
        return self.energies[state]


@dataclass(frozen=True)
class MomentTable:
    """Diagonal operator moments per (state, power)."""

    values: dict

    def get(self, state, power):
        return self.values[(state, mpf(power))]


@dataclass(frozen=True)
class SweepRecord:
    n: int
    params: OptimizedParams
    energies: tuple          # tracked states only, (state, value) pairs
    moments: dict            # (state, power) -> value
    delta_e: dict            # state -> error vs reference (relative; absolute if ref == 0)
    moment_err: dict         # (state, power) -> relative error vs reference
    trusted_count: int


@dataclass(frozen=True)
class ConvergenceReport:
    records: tuple
    reference: dict          # state -> reference energy (may be empty)
    reference_moments: dict  # (state, power) -> reference value
    reference_source: str    # "none" | "self" | "supplied"


@dataclass(frozen=True)
class SplittingResult:
    delta_e: object
    e0: object
    e1: object
    omega: object
    n: int
    digits: int
    resolved: bool


def solve(potential: Potential, n, precision=None, strategy="auto", *,
          omega=None, gamma=None, trace_scope=None, want_vectors=True) -> SpectralResult:
    """One optimized solve: fix parameters by the trace condition (or use the
    frozen ones), assemble the order-n matrix, and diagonalize."""
    cfg = coerce(precision)
    with workdps(cfg):
        obj = strategy_presets(potential, n, strategy, omega=omega, gamma=gamma,
                               trace_scope=trace_scope)
        params = resolve_params(obj, cfg)
        basis = _basis_for(potential, n, params)
        h = assemble(potential, basis, cfg)
        eig = eigh(h, cfg, want_vectors=want_vectors)
        return SpectralResult(potential, basis, params, eig.values, eig.vectors,
                              cfg.digits)


def resolve_params(obj: TraceObjective, precision=None) -> OptimizedParams:
    cfg = coerce(precision)
    with workdps(cfg):
        if obj.free:
            return optimize(obj, cfg)
        omega = as_mpf(obj.omega if obj.omega is not None else 1)
        gamma = None
        if obj.potential.kind == "radial":
            gamma = as_mpf(obj.gamma if obj.gamma is not None
                           else obj.potential.l + mpf(3) / 2)
            tr = trace_value(obj, (omega, gamma), cfg)
        else:
            tr = trace_value(obj, omega, cfg)
        return OptimizedParams(omega, gamma, tr, "fixed")


def _basis_for(potential, n, params: OptimizedParams) -> BasisSpec:
    if potential.kind == "1d":
        return BasisSpec("ho1d", n, omega=params.omega, parity=potential.parity)
    return BasisSpec("pho", n, omega=params.omega, gamma=params.gamma)


def moments(result: SpectralResult, powers, states=(0,), precision=None) -> MomentTable:
    """<<i|x^k|i>> (or r^k) for the requested eigenstates, from the exact
    unit-frequency operator matrices rescaled by Omega^(-k/2)."""
    if not result.vectors:
        raise SolverError("moments require eigenvectors; re-run solve with want_vectors=True")
    cfg = coerce(precision if precision is not None else result.digits)
    with workdps(cfg):
        n = result.n
        omega = as_mpf(result.basis.omega)
        values = {}
        for k in powers:
            k = mpf(k)
            if result.basis.family == "ho1d":
                op = ho_power_matrix(n, int(k), result.basis.parity, cfg).entries
            else:
                op = pho_power_matrix(n, k, as_mpf(result.basis.gamma), cfg).entries
            scale = omega ** (-k / 2)
            for state in states:
                c = result.vectors[state]
                acc = mpf(0)
                for i in range(n):
                    ci = c[i]
                    if not ci:
                        continue
                    row = mpf(0)
                    for j in range(n):
                        row += op.get(i, j) * c[j]
                    acc += ci * row
                values[(state, k)] = acc * scale
        return MomentTable(values)


def sweep(potential: Potential, n_list, precision=None, strategy="auto", *,
          omega=None, gamma=None, trace_scope=None, powers=(), states=(0,),
          reference=None, reference_moments=None) -> ConvergenceReport:
    """One optimized solve per order in n_list, with error metrics against a
    reference: an explicit {state: energy} mapping (closed-form oracle), or
    "self" for a converged high-order run at 2*max(N)+20 and doubled digits."""
    cfg = coerce(precision)
    n_list = list(n_list)
    if n_list != sorted(n_list):
        raise SolverError("n_list must be ascending")
    ref_energies = {}
    ref_moments = dict(reference_moments or {})
    source = "none"
    if reference == "self":
        source = "self"
        ref_cfg = cfg.scaled(2)
        n_ref = 2 * max(n_list) + 20
        ref = solve(potential, n_ref, ref_cfg, strategy, omega=omega, gamma=gamma,
                    trace_scope=trace_scope, want_vectors=bool(powers))
        with workdps(ref_cfg):
            ref_energies = {s: ref.energies[s] for s in states}
            if powers:
                mt = moments(ref, powers, states, ref_cfg)
                ref_moments = dict(mt.values)
    elif isinstance(reference, dict):
        source = "supplied"
        ref_energies = {s: as_mpf(v) for s, v in reference.items()}
        ref_moments = {(s, mpf(k)): as_mpf(v) for (s, k), v in ref_moments.items()}
    elif reference is not None:
        raise SolverError(f"unknown reference {reference!r}")

    records = []
    with workdps(cfg):
        for n in n_list:
            res = solve(potential, n, cfg, strategy, omega=omega, gamma=gamma,
                        trace_scope=trace_scope, want_vectors=bool(powers))
            tracked = tuple((s, res.energies[s]) for s in states if s < n)
            mom = {}
            if powers:
                mt = moments(res, powers, [s for s in states if s < n], cfg)
                mom = dict(mt.values)
            delta = {}
            for s, value in tracked:
                if s in ref_energies:
                    delta[s] = _error(value, ref_energies[s])
            merr = {}
            for key, value in mom.items():
                if key in ref_moments:
                    merr[key] = _error(value, ref_moments[key])
            records.append(SweepRecord(n, res.params, tracked, mom, delta, merr,
                                       res.trusted_count))
    return ConvergenceReport(tuple(records), ref_energies, ref_moments, source)


def _error(value, ref):
    ref = mpf(ref)
    if ref == 0:
        return abs(value)
    return abs(value - ref) / abs(ref)


def level_splitting(g, n, precision=None) -> SplittingResult:
    """Gap between the lowest two states of the symmetric double well
    g*(-1/2 d^2/dx^2) + (x^2-1/4)^2/(2g), from two parity-sector solves of a
    full basis of n states with a common trace-optimized frequency."""
    cfg = coerce(precision)
    with workdps(cfg):
        pot = double_well(g)
        obj = TraceObjective(pot, n, ("omega",), trace_states=tuple(range(n)))
        params = optimize(obj, cfg)
        n_even = (n + 1) // 2
        n_odd = n // 2
        sector_energies = {}
        for parity, size in (("even", n_even), ("odd", n_odd)):
            sector = dataclasses.replace(pot, parity=parity)
            basis = BasisSpec("ho1d", size, omega=params.omega, parity=parity)
            h = assemble(sector, basis, cfg)
            eig = eigh(h, cfg, want_vectors=False)
            sector_energies[parity] = eig.values[0]
        e0 = sector_energies["even"]
        e1 = sector_energies["odd"]
        delta = e1 - e0
        resolution = abs(e0) * mpf(10) ** (-(cfg.digits - 10))
        resolved = delta > resolution
        return SplittingResult(delta, e0, e1, params.omega, n, cfg.digits, resolved)


# ------------------------------------------------------------- rescalings

def reduced_omega_sq(omega_sq, lam, k):
    """omega^2 of the unit-coupling problem equivalent to (omega^2, lam)."""
    _check_k(k)
    return as_mpf(omega_sq) * as_mpf(lam) ** (mpf(-4) / (mpf(k) + 2))


def reduced_frequency(omega, lam, k):
    """omega of the unit-coupling problem equivalent to (omega, lam)."""
    _check_k(k)
    return as_mpf(omega) * as_mpf(lam) ** (mpf(-2) / (mpf(k) + 2))


def reduced_coupling(omega, lam, k):
    """coupling of the unit-frequency problem equivalent to (omega, lam)."""
    _check_k(k)
    return as_mpf(lam) * as_mpf(omega) ** (-(mpf(k) + 2) / 2)


def scaling_transport(energies, k, *, lam=None, omega=None):
    """Rescale unit-normalized energies to the target couplings.

    With lam given: E(omega, lam) = lam^(2/(k+2)) * E(reduced omega, 1).
    With omega given: E(omega, lam) = omega * E(1, reduced coupling).
    Exactly one of lam/omega must be supplied; k = -2 admits no such scaling.
    """
    _check_k(k)
    if (lam is None) == (omega is None):
        raise SolverError("supply exactly one of lam= or omega=")
    if lam is not None:
        factor = as_mpf(lam) ** (mpf(2) / (mpf(k) + 2))
    else:
        factor = as_mpf(omega)
    return tuple(factor * mpf(e) for e in energies)


def _check_k(k):
    if mpf(k) == -2:
        raise SolverError("k = -2 separates the scaling regimes; no rescaling exists")


# ------------------------------------------------------------- diagnostics

def virial_residual(result: SpectralResult, state=0, precision=None):
    """Relative defect of 2<T> = sum_k k c_k <r^k> on one eigenstate, with the
    centrifugal barrier folded in as a k = -2 term and <T> = E - <W>."""
    cfg = coerce(precision if precision is not None else result.digits)
    with workdps(cfg):
        pot = result.potential
        terms = list(pot.realized_terms())
        if pot.kind == "radial" and pot.l > 0:
            s_t = as_mpf(pot.kinetic_scale)
            terms.append((mpf(-2), s_t * pot.l * (pot.l + 1) / 2))
        mt = moments(result, [k for k, _ in terms], (state,), cfg)
        e = result.energies[state]
        w = sum(c * mt.get(state, k) for k, c in terms)
        t = e - w
        rhs = sum(k * c * mt.get(state, k) for k, c in terms)
        return abs(2 * t - rhs) / max(abs(e), mpf(1))

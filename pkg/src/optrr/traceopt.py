"""Fixing the nonlinear basis parameters by minimizing the truncated trace.

The trace of the truncated Hamiltonian is the sum of the lowest N diagonal
elements, available in closed form without assembling the matrix, so the
stationarity condition is cheap to evaluate per order N.  Stationary is
realized as constrained minimization: among interior minima the deepest
sampled one wins, ties toward smaller Omega.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mpf, sqrt

from .basis import (GAMMA_POLE_OFFSET, ho_kinetic_diag, ho_power_diag,
                    pho_power_diag_sum, radial_term_coefficients,
                    sector_indices)
from .optimize import Min2DResult, NoMinimumError, minimize_2d, minimize_scalar
from .potentials import Potential
from .precision import as_mpf, coerce, workdps

STRATEGIES = ("fixed", "trace-omega", "trace-gamma", "trace-joint")

#: 1D trace scopes: "sector" sums the N retained sector states; "paired"
#: sums the 2N-1 lowest full-basis states (N of the solve parity plus the
#: N-1 interleaved ones), the convention behind the quartic benchmarks.
TRACE_SCOPES = ("sector", "paired")

_REL_TOL = mpf("1e-12")


class TraceOptimizeError(RuntimeError):
    pass


@dataclass(frozen=True)
class TraceObjective:
    """Trace of the order-N Hamiltonian as a function of the free parameters."""

    potential: Potential
    n: int
    free: tuple                    # subset of ("omega", "gamma")
    omega: object = None           # frozen value when "omega" not free
    gamma: object = None           # frozen value when "gamma" not free (radial)
    trace_scope: str = "paired"    # 1d only
    trace_states: tuple = None     # explicit full-basis indices (overrides scope)

    def __post_init__(self):
        for p in self.free:
            if p not in ("omega", "gamma"):
                raise TraceOptimizeError(f"unknown free parameter {p!r}")
        if self.potential.kind == "1d" and "gamma" in self.free:
            raise TraceOptimizeError("gamma is not a 1D basis parameter")
        if self.trace_scope not in TRACE_SCOPES:
            raise TraceOptimizeError(f"trace_scope must be one of {TRACE_SCOPES}")

    def states_1d(self):
        if self.trace_states is not None:
            return list(self.trace_states)
        if self.trace_scope == "paired":
            return list(range(2 * self.n - 1))
        parity = "full" if self.potential.parity == "full" else self.potential.parity
        return sector_indices(self.n, parity)

    def gamma_floor(self):
        return self.potential.gamma_lower_bound() + GAMMA_POLE_OFFSET


@dataclass(frozen=True)
class OptimizedParams:
    """Optimized (or frozen) nonlinear parameters and the trace value there."""

    omega: object
    gamma: object                  # None for the 1D basis
    trace_value: object
    strategy: str
    boundary_pinned: bool = False


def _trace_fn_1d(obj: TraceObjective, precision):
    cfg = coerce(precision)
    with workdps(cfg):
        states = obj.states_1d()
        g = as_mpf(obj.potential.kinetic_scale)
        kin = g * sum(ho_kinetic_diag(n) for n in states)
        terms = []
        for k, c in obj.potential.realized_terms():
            k = int(k)
            s = sum(ho_power_diag(n, k, cfg) for n in states)
            terms.append((mpf(k), c * s))

    def trace(omega):
        total = kin * omega
        for k, cs in terms:
            total += cs * omega ** (-k / 2)
        return total

    return trace


def _trace_fn_radial(obj: TraceObjective, precision):
    cfg = coerce(precision)
    pot = obj.potential
    n = obj.n
    sum_2n = mpf(n * (n - 1))  # sum of 2i over i < n
    diag_sums = {}

    def other_sums(gamma):
        key = gamma
        cached = diag_sums.get(key)
        if cached is None:
            with workdps(cfg):
                cached = [(k, pho_power_diag_sum(n, k, gamma))
                          for k, _ in pot.realized_terms() if k != 2]
            diag_sums[key] = cached
        return cached

    def trace(omega, gamma):
        with workdps(cfg):
            omega = mpf(omega)
            gamma = mpf(gamma)
            diag_factor, coef_r2, coef_inv_r2, others = radial_term_coefficients(
                pot, omega, gamma)
            sum_2n_gamma = sum_2n + n * gamma
            total = diag_factor * sum_2n_gamma + coef_r2 * sum_2n_gamma
            if coef_inv_r2 != 0:
                total += coef_inv_r2 * n / (gamma - 1)
            coeffs = {k: c for k, c in others}  # Omega^(-k/2) already applied
            for k, dsum in other_sums(gamma):
                total += coeffs[k] * dsum
            return total

    return trace


def trace_value(obj: TraceObjective, point, precision=None):
    """Trace at the given parameter point, from diagonal closed forms.

    point: omega for the 1D basis, (omega, gamma) for the radial one.
    """
    cfg = coerce(precision)
    with workdps(cfg):
        if obj.potential.kind == "1d":
            return _trace_fn_1d(obj, cfg)(as_mpf(point))
        omega, gamma = point
        return _trace_fn_radial(obj, cfg)(as_mpf(omega), as_mpf(gamma))


def _omega_bracket(potential):
    om_sq = potential.omega_sq()
    om = sqrt(abs(om_sq)) if om_sq != 0 else mpf(1)
    return max(mpf("0.1"), om / 10), 10 * max(mpf(1), om)


def optimize(obj: TraceObjective, precision=None) -> OptimizedParams:
    """Minimize the trace over the free parameters within the constraint box."""
    cfg = coerce(precision)
    with workdps(cfg):
        if not obj.free:
            raise TraceOptimizeError("no free parameters to optimize")
        strategy = {("omega",): "trace-omega",
                    ("gamma",): "trace-gamma",
                    ("omega", "gamma"): "trace-joint"}[tuple(sorted(obj.free, reverse=True))]
        if obj.potential.kind == "1d":
            fn = _trace_fn_1d(obj, cfg)
            lo, hi = _omega_bracket(obj.potential)
            tol = _REL_TOL * max(1, hi / 10)
            omega, val = minimize_scalar(fn, (lo, hi), tol)
            return OptimizedParams(omega, None, val, strategy)
        fn2 = _trace_fn_radial(obj, cfg)
        gamma_floor = obj.gamma_floor()
        if strategy == "trace-omega":
            gamma = mpf(as_mpf(obj.gamma if obj.gamma is not None else obj.potential.l + mpf(3) / 2))
            lo, hi = _omega_bracket(obj.potential)
            tol = _REL_TOL * max(1, hi / 10)
            omega, val = minimize_scalar(lambda w: fn2(w, gamma), (lo, hi), tol)
            return OptimizedParams(omega, gamma, val, strategy)
        if strategy == "trace-gamma":
            if obj.omega is None:
                raise TraceOptimizeError("trace-gamma requires a frozen omega")
            omega = as_mpf(obj.omega)
            g_lo = gamma_floor
            g_hi = max(2 * (obj.potential.l + mpf(3) / 2), g_lo + 4)
            tol = _REL_TOL * max(1, g_hi / 10)
            try:
                gamma, val = minimize_scalar(lambda g: fn2(omega, g), (g_lo, g_hi),
                                             tol, hard_lo=g_lo)
            except NoMinimumError:
                return OptimizedParams(omega, g_lo, fn2(omega, g_lo), strategy,
                                       boundary_pinned=True)
            return OptimizedParams(omega, gamma, val, strategy)
        # trace-joint
        om_lo, om_hi = _omega_bracket(obj.potential)
        g_lo = gamma_floor
        g_hi = max(2 * (obj.potential.l + mpf(3) / 2), g_lo + 4)
        g_start = obj.potential.l + mpf(3) / 2
        if g_start <= g_lo:
            g_start = g_lo + 1
        om_sq = obj.potential.omega_sq()
        om_start = sqrt(om_sq) if om_sq > 0 else mpf(1)
        res: Min2DResult = minimize_2d(fn2, (om_start, g_start),
                                       ((om_lo, om_hi), (g_lo, g_hi)), _REL_TOL)
        return OptimizedParams(res.x, res.y, res.fun, strategy,
                               boundary_pinned=res.boundary_pinned)


def strategy_presets(potential: Potential, n, strategy="auto", *,
                     omega=None, gamma=None, trace_scope=None,
                     trace_states=None) -> TraceObjective:
    """Build the trace objective with the recommended free/frozen split.

    auto classification: 1D potentials free Omega; radial potentials with
    only positive anharmonic powers free Omega at gamma = l + 3/2; spiked
    shapes (r^2 plus a single k < -1 power) freeze Omega at the harmonic
    frequency and free gamma; the k = -1 Coulomb case keeps both parameters
    at their naive values; anything else frees both.
    """
    if strategy == "auto":
        strategy = classify(potential)
    if strategy not in STRATEGIES:
        raise TraceOptimizeError(f"unknown strategy {strategy!r}")
    scope = trace_scope
    if scope is None:
        scope = "paired" if potential.kind == "1d" else "sector"
    kwargs = dict(trace_scope=scope, trace_states=tuple(trace_states) if trace_states else None)
    if potential.kind == "1d":
        if strategy in ("trace-gamma", "trace-joint"):
            raise TraceOptimizeError("gamma strategies require the radial basis")
        if strategy == "fixed":
            if omega is None:
                omega = _default_omega(potential)
            return TraceObjective(potential, n, (), omega=omega, **kwargs)
        return TraceObjective(potential, n, ("omega",), **kwargs)
    if gamma is None and strategy in ("fixed", "trace-omega"):
        gamma = potential.l + mpf(3) / 2
    if omega is None and strategy in ("fixed", "trace-gamma"):
        omega = _default_omega(potential)
    free = {"fixed": (), "trace-omega": ("omega",),
            "trace-gamma": ("gamma",), "trace-joint": ("omega", "gamma")}[strategy]
    return TraceObjective(potential, n, free, omega=omega, gamma=gamma, **kwargs)


def classify(potential: Potential) -> str:
    if potential.kind == "1d":
        return "trace-omega"
    neg = potential.negative_powers()
    if not neg:
        return "trace-omega"
    positive = [k for k, _ in potential.realized_terms() if k > 0]
    if len(neg) == 1 and neg[0] == -1 and positive == [mpf(2)]:
        return "fixed"  # naive Coulomb-case parameters
    if min(neg) < -1 and positive == [mpf(2)] and potential.quadratic_coefficient() > 0:
        return "trace-gamma"
    return "trace-joint"


def _default_omega(potential: Potential):
    om_sq = potential.omega_sq()
    if om_sq <= 0:
        raise TraceOptimizeError(
            "cannot freeze omega: potential has no positive quadratic term")
    return sqrt(om_sq)

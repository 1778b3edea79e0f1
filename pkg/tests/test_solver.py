import pytest
from mpmath import mp, mpf, sqrt

from optrr import (level_splitting, moments, quartic, reduced_coupling,
                   reduced_omega_sq, scaling_transport, sextic_1d,
                   sextic_1d_qes, solve, spiked, sweep, virial_residual,
                   workdps)
from optrr.solver import SolverError
from optrr import qes
from conftest import approx_abs, approx_rel


def test_harmonic_levels_any_strategy():
    with workdps(30):
        pot = quartic(4, 0, parity="full")  # omega = 2
        res = solve(pot, 6, 30)
        for n, e in enumerate(res.energies):
            assert approx_rel(e, 2 * (n + mpf(1) / 2), mpf("1e-22"))
        assert approx_rel(res.params.omega, 2, mpf("1e-11"))


def test_energy_sum_equals_minimized_trace():
    with workdps(30):
        pot = sextic_1d_qes(4, 0)
        res = solve(pot, 8, 30, trace_scope="sector")
        tol = 10 * mpf(10) ** -24 * max(abs(e) for e in res.energies) * 8
        assert abs(sum(res.energies) - res.params.trace_value) <= tol


def test_moment_normalization_power_zero():
    with workdps(30):
        pot = sextic_1d_qes(2, 0)
        res = solve(pot, 10, 30)
        mt = moments(res, [0], [0, 3, 7])
        for s in (0, 3, 7):
            assert approx_rel(mt.get(s, 0), 1, mpf("1e-23"))


def test_moments_require_vectors():
    pot = quartic()
    res = solve(pot, 4, 30, want_vectors=False)
    with pytest.raises(SolverError):
        moments(res, [2], [0])


def test_trusted_window():
    pot = quartic()
    res = solve(pot, 9, 30)
    assert res.trusted_count == 5


def test_hylleraas_undheim_monotonicity():
    # fixed parameters: each level decreases when the basis grows
    with workdps(30):
        pot = sextic_1d_qes(4, 0)
        prev = None
        for n in (6, 7, 8, 9):
            res = solve(pot, n, 30, "fixed", omega=mpf(3))
            if prev is not None:
                for i in range(len(prev)):
                    assert res.energies[i] <= prev[i] + mpf("1e-24")
            prev = res.energies


def test_parity_union_matches_full_spectrum():
    with workdps(30):
        full_pot = quartic(1, mpf(1) / 2, parity="full")
        even_pot = quartic(1, mpf(1) / 2, parity="even")
        odd_pot = quartic(1, mpf(1) / 2, parity="odd")
        om = mpf("1.9")
        full = solve(full_pot, 12, 30, "fixed", omega=om, want_vectors=False)
        even = solve(even_pot, 6, 30, "fixed", omega=om, want_vectors=False)
        odd = solve(odd_pot, 6, 30, "fixed", omega=om, want_vectors=False)
        merged = sorted(even.energies + odd.energies)
        for a, b in zip(full.energies, merged):
            assert approx_abs(a, b, mpf("1e-22") * max(1, abs(b)))


def test_sweep_against_exact_reference():
    with workdps(30):
        pot = sextic_1d_qes(8, 0)
        sol, = qes.exact_energies(qes.Sextic1D(8, 0), 30)
        report = sweep(pot, [10, 15, 20], 30, reference={0: sol.energies[0]})
        errs = [rec.delta_e[0] for rec in report.records]
        assert errs[2] < errs[1] < errs[0]
        assert report.reference_source == "supplied"


def test_sweep_self_reference():
    with workdps(30):
        pot = quartic()
        report = sweep(pot, [4, 6], 30, reference="self")
        assert report.reference_source == "self"
        assert all(rec.delta_e[0] > 0 for rec in report.records)
        assert report.records[1].delta_e[0] < report.records[0].delta_e[0]


def test_sweep_requires_ascending_orders():
    with pytest.raises(SolverError):
        sweep(quartic(), [10, 5], 30)


def test_virial_identity_1d():
    with workdps(30):
        pot = sextic_1d_qes(8, 0)
        res = solve(pot, 35, 30, trace_scope="sector")
        assert virial_residual(res, 0) <= mpf("1e-8")


def test_virial_identity_radial():
    # converged case (delta E ~ 1e-16 at this order), centrifugal term included
    with workdps(30):
        from optrr import radial_sextic_qes
        res = solve(radial_sextic_qes(8, l=1), 35, 30)
        assert virial_residual(res, 0) <= mpf("1e-8")


def test_moment_cauchy_schwarz():
    with workdps(30):
        pot = sextic_1d_qes(8, 0)
        res = solve(pot, 20, 30)
        mt = moments(res, [2, 4], [0, 1, 2, 3])
        for s in range(4):
            assert mt.get(s, 2) ** 2 <= mt.get(s, 4) * (1 + mpf("1e-20"))


def test_scaling_identity_at_unit_coupling():
    with workdps(30):
        es = (mpf(1), mpf(2))
        assert scaling_transport(es, 6, lam=1) == es
        assert scaling_transport(es, -6, omega=1) == es


def test_scaling_rejects_border_power():
    with pytest.raises(SolverError):
        scaling_transport((mpf(1),), -2, lam=2)
    with pytest.raises(SolverError):
        scaling_transport((mpf(1),), 6, lam=2, omega=2)


def test_sextic_coupling_transport_dual_solve():
    # solve at coupling mu must equal mu^(1/4) times the unit-coupling solve
    with workdps(40):
        mu = mpf(16)
        base = sextic_1d_qes(8, 0, lam=1)
        res_base = solve(base, 30, 40, trace_scope="sector", want_vectors=False)
        scaled_pot = sextic_1d(lambda: -35 * sqrt(mpf(2)) * sqrt(mu), mu)
        assert approx_rel(reduced_omega_sq(scaled_pot.omega_sq(), mu, 6),
                          base.omega_sq(), mpf("1e-30"))
        res_scaled = solve(scaled_pot, 30, 40, trace_scope="sector", want_vectors=False)
        transported = scaling_transport(res_base.energies, 6, lam=mu)
        for a, b in zip(transported[:15], res_scaled.energies[:15]):
            assert approx_rel(b, a, mpf("1e-10"))


def test_spiked_frequency_transport_dual_solve():
    # E(omega, lam) = omega * E(1, omega^2 lam)
    with workdps(30):
        om, lam = mpf(2), mpf(5)
        direct = solve(spiked(lam, om), 30, 30, want_vectors=False)
        lam_red = reduced_coupling(om, lam, -6)
        assert approx_rel(lam_red, om * om * lam, mpf("1e-25"))
        base = solve(spiked(lam_red, 1), 30, 30, want_vectors=False)
        transported = scaling_transport(base.energies, -6, omega=om)
        for a, b in zip(transported[:10], direct.energies[:10]):
            assert approx_rel(b, a, mpf("1e-8"))


def test_level_splitting_wide_well():
    # kinetic-dominated well: order-one gap, stable between basis sizes
    with workdps(40):
        a = level_splitting(10, 40, 40)
        b = level_splitting(10, 60, 40)
        assert a.delta_e > 0 and b.delta_e > 0
        assert a.resolved and b.resolved
        assert approx_rel(a.delta_e, b.delta_e, mpf("1e-10"))


def test_level_splitting_positive_for_symmetric_well():
    with workdps(30):
        r = level_splitting(mpf("0.5"), 30, 30)
        assert r.delta_e > 0


def test_splitting_unresolved_flag():
    # deep well at minimal precision: the true gap sits below the resolution
    with workdps(15):
        r = level_splitting(mpf("0.01"), 40, 15)
        assert not r.resolved


def test_eigenvector_determinism():
    pot = sextic_1d_qes(2, 0)
    a = solve(pot, 8, 30)
    b = solve(pot, 8, 30)
    assert a.energies == b.energies
    assert a.vectors == b.vectors

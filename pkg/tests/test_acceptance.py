"""End-to-end acceptance gate.

Each test prints one PASS/FAIL line.  Tolerances are pinned here, not
configurable.  The double-well splitting check is nightly-scale and carries
the slow marker (run with `pytest -m slow`).
"""

import contextlib
import time

import pytest
from mpmath import cos, atan, mp, mpf, sqrt

import optrr
from optrr import (level_splitting, moments, quartic, radial_sextic_qes,
                   scaling_transport, sextic_1d, sextic_1d_qes, solve, sweep,
                   virial_residual, workdps)
from optrr.potentials import harmonium, power_mix
from optrr import qes
from conftest import approx_abs, approx_rel

pytestmark = pytest.mark.acceptance


@contextlib.contextmanager
def criterion(num, label):
    start = time.time()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {num} [{label}]: FAIL ({time.time() - start:.1f}s)")
        raise
    print(f"ACCEPTANCE {num} [{label}]: PASS ({time.time() - start:.1f}s)")


TABLE_QUARTIC = {
    1: ("1.29294233500847", "1.09716442402927e-2"),
    5: ("1.65920419620602", "8.63597923540916e-7"),
    10: ("1.86080663733626", "1.86447406929386e-12"),
    15: ("1.98940338014799", "6.71884044353837e-19"),
    20: ("2.08593508969090", "4.36194667514212e-24"),
}


def test_criterion_1_quartic_frequency_table():
    # The benchmark's error column is normalized to the bare half-frequency
    # omega/2 (the absolute error in the doubled-Hamiltonian convention),
    # constant across all rows: plain relative errors are exactly 1/(2 E_ref)
    # times these values.
    with criterion(1, "quartic optimal frequencies and ground-state errors"):
        t0 = time.time()
        with workdps(40):
            pot = quartic()  # omega^2 = 1, lam = 1/2
            ref = solve(pot, 80, 40, trace_scope="paired", want_vectors=False)
            e_ref = ref.energies[0]
            for n, (sqrt_om, delta) in TABLE_QUARTIC.items():
                res = solve(pot, n, 40, trace_scope="paired", want_vectors=False)
                assert approx_abs(sqrt(res.params.omega), mpf(sqrt_om), mpf("1e-10"))
                measured = 2 * abs(res.energies[0] - e_ref)
                assert approx_rel(measured, mpf(delta), mpf("0.01"))
        assert time.time() - t0 < 60


TABLE_SEXTIC_GROUND = {  # order 35, ground state
    "e": "-40.52625282343567",
    2: "2.72643167389269",
    6: "23.60630748253899",
    10: "242.23182241787521",
}
TABLE_SEXTIC_N16 = {  # order 40, sector state 8 (16th level overall)
    "e": "40.52625282343567",
    2: "2.03737569518631",
    6: "35.34280117894960",
    10: "856.42125207596973",
}


def test_criterion_2_sextic_energies_and_moments():
    with criterion(2, "sextic ground state and 16th level with moments"):
        t0 = time.time()
        with workdps(30):
            pot = sextic_1d_qes(8, 0)
            res = solve(pot, 35, 30)
            assert approx_rel(res.energies[0], mpf(TABLE_SEXTIC_GROUND["e"]), mpf("1e-13"))
            mt = moments(res, [2, 6, 10], [0])
            for k in (2, 6, 10):
                assert approx_rel(mt.get(0, k), mpf(TABLE_SEXTIC_GROUND[k]), mpf("1e-12"))
            res40 = solve(pot, 40, 30)
            assert approx_rel(res40.energies[8], mpf(TABLE_SEXTIC_N16["e"]), mpf("1e-13"))
            mt16 = moments(res40, [2, 6, 10], [8])
            for k in (2, 6, 10):
                assert approx_rel(mt16.get(8, k), mpf(TABLE_SEXTIC_N16[k]), mpf("1e-11"))
        assert time.time() - t0 < 120


def test_criterion_3_sextic_closed_form_equivalence():
    with criterion(3, "sextic closed-form energies and residuals"):
        with workdps(30):
            sol, = qes.exact_energies(qes.Sextic1D(8, 0), 30)
            es = sol.energies
            assert len(es) == 9
            assert abs(sum(es)) <= mpf("1e-12")
            for e in es:
                assert any(abs(e + f) <= mpf("1e-12") for f in es)
            edge = mpf("40.52625282343567")
            assert approx_rel(es[0], -edge, mpf("1e-13"))
            assert approx_rel(es[-1], edge, mpf("1e-13"))
            for i in range(9):
                st = qes.exact_state(sol, i, 30)
                assert qes.residual_check(st, 30) <= mpf("1e-10")


TABLE_RADIAL_GROUND = {  # order 35, l = 1 ground state
    "e": "-48.11353418905196",
    2: "2.90220193690738",
    6: "27.98886651695584",
    10: "314.77282672244337",
}
TABLE_RADIAL_N8 = {  # order 40, l = 1, highest closed-form state
    "e": "48.11353418905197",
    2: "2.17593184312375",
    6: "42.03139869987743",
    10: "1135.66913419894809",
}


def test_criterion_4_radial_sextic():
    with criterion(4, "radial sextic energies and moments at l=1"):
        with workdps(30):
            pot = radial_sextic_qes(8, l=1)
            res = solve(pot, 35, 30)
            assert approx_rel(res.energies[0], mpf(TABLE_RADIAL_GROUND["e"]), mpf("1e-13"))
            mt = moments(res, [2, 6, 10], [0])
            for k in (2, 6, 10):
                assert approx_rel(mt.get(0, k), mpf(TABLE_RADIAL_GROUND[k]), mpf("1e-11"))
            res40 = solve(pot, 40, 30)
            assert approx_rel(res40.energies[8], mpf(TABLE_RADIAL_N8["e"]), mpf("1e-13"))
            mt8 = moments(res40, [2, 6, 10], [8])
            for k in (2, 6, 10):
                assert approx_rel(mt8.get(8, k), mpf(TABLE_RADIAL_N8[k]), mpf("1e-11"))


def test_criterion_5a_coulomb_frequency_roots():
    with criterion("5a", "closed-form trap frequencies of the Coulomb case"):
        with workdps(30):
            sols = qes.exact_energies(qes.Harmonium(1, 0), 30)
            assert approx_abs(sols[0].parameter, mpf("0.25"), mpf("1e-14"))
            sols4 = qes.exact_energies(qes.Harmonium(4, 0), 30)
            smallest = min(s.parameter for s in sols4)
            assert approx_abs(smallest, (35 - 3 * sqrt(mpf(57))) / 1424, mpf("1e-14"))


def _coulomb_sweep(strategy, n_list):
    pot = harmonium(mpf(1) / 4)
    kwargs = {}
    if strategy == "fixed":
        kwargs = dict(omega=mpf(1) / 4, gamma=mpf(3) / 2)
    return sweep(pot, n_list, 30, strategy, reference={0: mpf("1.25")}, **kwargs)


def test_criterion_5b_coulomb_convergence():
    # Known red: the even-power radial basis reproduces the Coulomb cusp only
    # algebraically (delta E ~ N^-1.5 here), so the 1e-6 target at order 60
    # is out of reach for both parameter choices; the decay assertions hold.
    with criterion("5b", "Coulomb-case convergence of both schemes"):
        with workdps(30):
            n_list = [10, 20, 40, 60]
            for strategy in ("fixed", "trace-joint"):
                report = _coulomb_sweep(strategy, n_list)
                errs = [rec.delta_e[0] for rec in report.records]
                for a, b in zip(errs, errs[1:]):
                    assert b < a, f"{strategy}: delta E not strictly decreasing"
                assert errs[-1] <= mpf("1e-6"), \
                    f"{strategy}: delta E at order 60 is {errs[-1]}"


SPIKED_TABLE = {  # order: (gamma_opt, E0)
    20: ("14.48", "6.00021390368223"),
    40: ("17.29", "6.00000223509568"),
    80: ("20.97", "6.00000006213529"),
    120: ("23.61", "6.00000000480818"),
}
SPIKED_EXACT_LARGE = {1: "2.84561898466095", 2: "8.28185529459909", 6: "737.240860856683"}
SPIKED_EXACT_SMALL = {1: "1.43226578557733", 2: "2.25844053161144", 6: "29.4482015786915"}


def test_criterion_6_spiked_oscillator():
    with criterion(6, "spiked oscillator couplings, sweep and exact moments"):
        t0 = time.time()
        with workdps(30):
            sol0 = qes.exact_energies(qes.Spiked(0), 30)[0]
            assert approx_abs(sol0.parameter, mpf(9) / 128, mpf("1e-20"))
            sols2 = qes.exact_energies(qes.Spiked(2), 30)
            lam20 = mpf(5) / 384 * (9887 + 32 * sqrt(mpf(333778)) * cos(
                atan(mpf(1852389) * sqrt(mpf(1001)) / mpf(478512623)) / 3))
            assert approx_rel(sols2[0].parameter, lam20, mpf("1e-10"))
            # exact moment rows
            st_large = qes.exact_state(sols2[0], 0, 30)
            for k, v in SPIKED_EXACT_LARGE.items():
                got = qes.exact_moments(st_large, [k], 30)[mpf(k)]
                assert approx_rel(got, mpf(v), mpf("1e-12"))
            st_small = qes.exact_state(sol0, 0, 30)
            for k, v in SPIKED_EXACT_SMALL.items():
                got = qes.exact_moments(st_small, [k], 30)[mpf(k)]
                assert approx_rel(got, mpf(v), mpf("1e-12"))
            # gamma-optimized sweep at the large coupling
            report = sweep(sols2[0].potential, list(SPIKED_TABLE), 30,
                           "trace-gamma", reference={0: mpf(6)})
            for rec in report.records:
                gamma_ref, e_ref = SPIKED_TABLE[rec.n]
                assert approx_abs(rec.params.gamma, mpf(gamma_ref), mpf("0.05"))
                assert approx_abs(dict(rec.energies)[0], mpf(e_ref), mpf("1e-9"))
                assert rec.params.gamma > 3
        assert time.time() - t0 < 600


SPLITTING_REFERENCE = (
    "1.4704644541750925013819899644941519815678003500526035283860533337803"
    "6605041575193505284182673433993282124674887e-68")


@pytest.mark.slow
def test_criterion_7_deep_double_well_splitting():
    with criterion(7, "deep double-well level splitting at 250 digits"):
        with workdps(250):
            result = level_splitting(mpf("0.001"), 350, 250)
            assert result.resolved
            ref = mpf(SPLITTING_REFERENCE)
            assert abs(result.delta_e - ref) <= mpf("1e-50") * ref


def test_criterion_8_property_bundle():
    with criterion(8, "variational, virial, scaling and determinant properties"):
        with workdps(30):
            # Rayleigh-Ritz monotonicity at fixed parameters
            pot = sextic_1d_qes(4, 0)
            prev = None
            for n in (6, 8, 10):
                res = solve(pot, n, 30, "fixed", omega=mpf(3), want_vectors=False)
                if prev is not None:
                    assert all(res.energies[i] <= prev[i] + mpf("1e-24")
                               for i in range(len(prev)))
                prev = res.energies
            # virial identity on a converged state
            res = solve(radial_sextic_qes(8, l=1), 35, 30)
            assert virial_residual(res, 0) <= mpf("1e-8")
            # coupling-transport identity through the optimized pipeline
            mu = mpf(16)
            base = solve(sextic_1d_qes(8, 0), 16, 30, trace_scope="sector",
                         want_vectors=False)
            scaled = solve(sextic_1d(lambda: -35 * sqrt(mpf(2)) * sqrt(mu), mu),
                           16, 30, trace_scope="sector", want_vectors=False)
            moved = scaling_transport(base.energies, 6, lam=mu)
            for a, b in zip(moved[:8], scaled.energies[:8]):
                assert approx_rel(b, a, mpf("1e-8"))
            # frequency-transport identity for the spiked shape
            om, lam = mpf(2), mpf(5)
            direct = solve(optrr.spiked(lam, om), 16, 30, want_vectors=False)
            reduced = solve(optrr.spiked(om * om * lam, 1), 16, 30, want_vectors=False)
            moved = scaling_transport(reduced.energies, -6, omega=om)
            for a, b in zip(moved[:6], direct.energies[:6]):
                assert approx_rel(b, a, mpf("1e-8"))
            # padded-block exactness
            small = optrr.ho_power_matrix(5, 6, "even", 30).entries
            big = optrr.ho_power_matrix(15, 6, "even", 30).entries
            assert all(small.get(i, j) == big.get(i, j)
                       for i in range(5) for j in range(5))
            # continuant vs cofactor expansion up to order five
            from test_rootfind import cofactor_det, tridiagonal_rows
            import random
            rng = random.Random(7)
            for p in range(6):
                a = [mpf(rng.randint(-24, 24)) / 8 for _ in range(p + 1)]
                b = [mpf(rng.randint(-24, 24)) / 8 for _ in range(p + 1)]
                c = [mpf(rng.randint(-24, 24)) / 8 for _ in range(p + 1)]
                det = optrr.continuant_det(a, b, c, p)
                brute = cofactor_det(tridiagonal_rows(a, b, c, p))
                if brute == 0:
                    assert abs(det) <= mpf("1e-18")
                else:
                    assert approx_rel(det, brute, mpf("1e-12"))
            # every 1/r^6 optimization stays above the singular bound
            for lam in (mpf(9) / 128, mpf("369.26")):
                for n in (6, 12):
                    r = solve(optrr.spiked(lam, 1), n, 30, "trace-gamma",
                              want_vectors=False)
                    assert r.params.gamma > 3


GENERALIZED_S = ("-1.5", "-1.8", "-1.95", "-2.05", "-2.2", "-2.5")
GENERALIZED_T = (2, 4, 6)


def test_criterion_9_generalized_oscillators():
    with criterion(9, "mixed-power oscillators: stable sweeps, log-linear errors"):
        with workdps(30):
            n_list = [6, 9, 12, 15, 18]
            top = len(n_list) // 2
            for s in GENERALIZED_S:
                for t in GENERALIZED_T:
                    pot = power_mix(s, t)
                    report = sweep(pot, n_list, 30, reference="self",
                                   states=(0,))
                    errs = [(rec.n, rec.delta_e[0]) for rec in report.records]
                    assert all(e > 0 for _, e in errs)
                    tail = errs[-(top + 1):]
                    xs = [mpf(n) for n, _ in tail]
                    ys = [mp.log10(e) for _, e in tail]
                    xm = sum(xs) / len(xs)
                    ym = sum(ys) / len(ys)
                    slope = (sum((x - xm) * (y - ym) for x, y in zip(xs, ys))
                             / sum((x - xm) ** 2 for x in xs))
                    assert slope < 0, f"s={s} t={t}: error not decaying (slope {slope})"

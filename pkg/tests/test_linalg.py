import pytest
from mpmath import mpf

from optrr import PrecisionConfig, SymMatrix, eigh, quartic, workdps
from optrr.basis import BasisSpec, assemble_1d
from conftest import approx_abs


def sym(rows):
    return SymMatrix.from_rows([[mpf(x) for x in row] for row in rows])


def test_diagonal_matrix_sorted():
    dec = eigh(sym([[3, 0, 0], [0, 1, 0], [0, 0, 2]]), 30)
    assert [float(v) for v in dec.values] == [1.0, 2.0, 3.0]
    # identity-permutation vectors: each column hits a single basis state
    assert dec.vector(0)[1] == 1
    assert dec.vector(1)[2] == 1
    assert dec.vector(2)[0] == 1


def test_two_by_two_symmetric():
    dec = eigh(sym([[0, 1], [1, 0]]), 30)
    with workdps(30):
        assert approx_abs(dec.values[0], -1, mpf("1e-25"))
        assert approx_abs(dec.values[1], 1, mpf("1e-25"))


def test_harmonic_oscillator_spectrum():
    # lam = 0 quartic at Omega = omega = 1: exact levels n + 1/2
    pot = quartic(1, 0, parity="full")
    with workdps(30):
        h = assemble_1d(pot, BasisSpec("ho1d", 5, omega=1, parity="full"), 30)
        dec = eigh(h, 30)
        for n, v in enumerate(dec.values):
            assert approx_abs(v, mpf(2 * n + 1) / 2, mpf("1e-25"))


def test_asymmetric_input_rejected():
    with pytest.raises(ValueError):
        SymMatrix.from_rows([[mpf(0), mpf(1)], [mpf(2), mpf(0)]])


def _test_matrix(n, scale=1):
    return SymMatrix.from_fn(
        n, lambda i, j: mpf(scale) / (1 + abs(i - j)) + (mpf(i + 1) if i == j else mpf(0)))


def test_decomposition_invariants():
    cfg = PrecisionConfig(30)
    with workdps(cfg):
        n = 8
        a = _test_matrix(n)
        dec = eigh(a, cfg)
        tol = 10 * cfg.convergence_tol
        # orthonormality
        for i in range(n):
            for j in range(i, n):
                dot = sum(dec.vector(i)[k] * dec.vector(j)[k] for k in range(n))
                assert abs(dot - (1 if i == j else 0)) <= tol
        # eigen residual
        hmax = a.max_abs()
        for i in range(n):
            v = dec.vector(i)
            for r in range(n):
                hv = sum(a.get(r, k) * v[k] for k in range(n))
                assert abs(hv - dec.values[i] * v[r]) <= tol * hmax
        # trace identity
        assert abs(sum(dec.values) - a.trace()) <= tol * n * hmax


def test_permutation_similarity_invariance():
    cfg = PrecisionConfig(30)
    with workdps(cfg):
        n = 6
        a = _test_matrix(n)
        perm = [3, 0, 5, 1, 4, 2]
        b = SymMatrix.from_fn(n, lambda i, j: a.get(perm[i], perm[j]))
        va = eigh(a, cfg).values
        vb = eigh(b, cfg).values
        for x, y in zip(va, vb):
            assert abs(x - y) <= 10 * cfg.convergence_tol


def test_precision_monotonicity():
    # raising digits from 30 to 60 moves the output by less than the 30-digit tol
    vals = {}
    for digits in (30, 60):
        cfg = PrecisionConfig(digits)
        with workdps(cfg):
            vals[digits] = eigh(_test_matrix(7), cfg).values
    tol30 = PrecisionConfig(30).convergence_tol
    with workdps(60):
        for x, y in zip(vals[30], vals[60]):
            assert abs(x - y) < tol30


def test_eigenvector_sign_fixed():
    dec = eigh(_test_matrix(6), 30)
    for i in range(6):
        col = dec.vector(i)
        assert max(col, key=abs) > 0


def test_eigenvalues_only_mode():
    a = _test_matrix(6)
    full = eigh(a, 30)
    lean = eigh(a, 30, want_vectors=False)
    assert lean.vectors == ()
    assert all(x == y for x, y in zip(full.values, lean.values))

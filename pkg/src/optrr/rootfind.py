"""Tridiagonal determinants (continuants) and sign-scan root extraction."""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mpf

from .precision import coerce, workdps


def continuant_det(A, B, C, p):
    """Determinant of the (p+1)x(p+1) tridiagonal matrix with diagonal B,
    superdiagonal A and subdiagonal C, by the three-term recurrence
    D_k = B_k D_{k-1} - A_{k-1} C_k D_{k-2} with D_{-1} = 1, D_{-2} = 0.

    A, B, C are indexed by row; A[p] and C[0] are never referenced.
    """
    if p < 0:
        raise ValueError("p must be >= 0")
    if len(B) < p + 1 or len(A) < p or len(C) < p + 1:
        raise ValueError("coefficient vectors too short for requested order")
    dm2, dm1 = mpf(0), mpf(1)
    for k in range(p + 1):
        d = B[k] * dm1
        if k >= 1:
            d -= A[k - 1] * C[k] * dm2
        dm2, dm1 = dm1, d
    return dm1


def continuant_scale(A, B, C, p):
    """max |D_k| along the continuant recurrence, for residual thresholds."""
    dm2, dm1 = mpf(0), mpf(1)
    scale = mpf(0)
    for k in range(p + 1):
        d = B[k] * dm1
        if k >= 1:
            d -= A[k - 1] * C[k] * dm2
        dm2, dm1 = dm1, d
        if abs(d) > scale:
            scale = abs(d)
    return scale


def bisect(f, a, b, tol, max_iter=None):
    """Refine a bracketed sign change to width <= tol by bisection."""
    fa = f(a)
    if fa == 0:
        return a
    fb = f(b)
    if fb == 0:
        return b
    if fa * fb > 0:
        raise ValueError("root not bracketed")
    if max_iter is None:
        max_iter = 64 + int(mpf(abs(b - a)) / mpf(tol)).bit_length() * 4
    for _ in range(max_iter):
        if b - a <= tol:
            break
        m = (a + b) / 2
        fm = f(m)
        if fm == 0:
            return m
        if fa * fm < 0:
            b = m
        else:
            a, fa = m, fm
    return (a + b) / 2


@dataclass(frozen=True)
class RootScan:
    """Sorted real roots in the search interval.

    complete is False when fewer roots than the caller's hint were found;
    touching lists even-multiplicity roots where f grazes zero without a
    sign change (detected through the sampled derivative).
    """

    roots: tuple
    complete: bool
    touching: tuple = ()


def poly_roots_real(f, interval, count_hint=None, precision=None, samples=None):
    """All sign-change roots of a continuous f on the interval, bisected to
    the precision's convergence tolerance; grazing double roots are detected
    via a derivative sign change with a near-zero function value."""
    cfg = coerce(precision)
    with workdps(cfg):
        lo, hi = mpf(interval[0]), mpf(interval[1])
        if not lo < hi:
            raise ValueError("interval must satisfy lo < hi")
        if samples is None:
            samples = max(256, 64 * (count_hint or 1))
        tol = cfg.convergence_tol * max(1, abs(lo), abs(hi))
        step = (hi - lo) / samples
        xs = [lo + step * i for i in range(samples + 1)]
        fs = [f(x) for x in xs]
        scale = max((abs(v) for v in fs), default=mpf(0))
        roots = []
        touching = []

        def neighbor_sign(i, direction):
            j = i + direction
            while 0 <= j <= samples and fs[j] == 0:
                j += direction
            if 0 <= j <= samples:
                return 1 if fs[j] > 0 else -1
            return 0

        def add(seq, x):
            if all(abs(x - r) > tol for r in seq):
                seq.append(x)

        for i in range(samples + 1):
            if fs[i] == 0:
                left, right = neighbor_sign(i, -1), neighbor_sign(i, 1)
                # same nonzero sign on both sides: the function grazes zero
                if left and right and left == right:
                    add(touching, xs[i])
                else:
                    add(roots, xs[i])
        for i in range(samples):
            f0, f1 = fs[i], fs[i + 1]
            if f0 != 0 and f1 != 0 and f0 * f1 < 0:
                add(roots, bisect(f, xs[i], xs[i + 1], tol))
        # grazing roots between grid points: interior dip of |f| toward zero
        # without a sign change, confirmed by the slope reversal
        if scale > 0:
            graze_tol = mpf(10) ** (-(cfg.digits // 2)) * scale
            for i in range(1, samples):
                if fs[i - 1] == 0 or fs[i] == 0 or fs[i + 1] == 0:
                    continue
                same_sign = fs[i - 1] * fs[i + 1] > 0
                dip = abs(fs[i]) < abs(fs[i - 1]) and abs(fs[i]) < abs(fs[i + 1])
                if same_sign and dip and abs(fs[i]) <= graze_tol:
                    from .optimize import golden_section
                    x, fx = golden_section(lambda t: abs(f(t)), xs[i - 1], xs[i + 1], tol)
                    if abs(fx) <= graze_tol and all(abs(x - r) > tol for r in roots):
                        add(touching, x)
        allr = sorted(roots)
        complete = count_hint is None or (len(allr) + 2 * len(touching)) >= count_hint
        return RootScan(tuple(allr), complete, tuple(sorted(touching)))

"""Derivative-free minimization: golden section in 1D, coordinate descent in 2D."""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mpf, sqrt


class NoMinimumError(RuntimeError):
    """No interior minimum was found inside the (expanded) bracket."""


def _inv_phi():
    return (sqrt(5) - 1) / 2


def golden_section(f, a, b, tol):
    """Golden-section search for the minimum of a unimodal f on [a, b]."""
    phi = _inv_phi()
    a, b = mpf(a), mpf(b)
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def _scan(f, lo, hi, samples, geometric):
    if geometric:
        ratio = (hi / lo) ** (mpf(1) / samples)
        xs = [lo * ratio ** i for i in range(samples + 1)]
    else:
        step = (hi - lo) / samples
        xs = [lo + step * i for i in range(samples + 1)]
    fs = [f(x) for x in xs]
    best = 0
    for i in range(1, len(xs)):
        if fs[i] < fs[best]:  # strict: ties resolve toward smaller x
            best = i
    return xs, fs, best


def minimize_scalar(f, bracket, tol, *, samples=32, expand_limit=40,
                    hard_lo=None, hard_hi=None):
    """Locate a local minimum of f inside bracket, expanding it if edge-pinned.

    The initial bracket is scanned on a grid (geometric when it spans positive
    values over more than a decade); the lowest interior sample seeds a
    golden-section refinement, so among several interior minima the deepest
    sampled one wins.  hard_lo/hard_hi are never crossed during expansion
    (singular parameter values excluded by the caller).  Returns (argmin, min).
    """
    lo, hi = mpf(bracket[0]), mpf(bracket[1])
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    for _ in range(expand_limit):
        geometric = lo > 0 and hi / lo > 10
        xs, fs, best = _scan(f, lo, hi, samples, geometric)
        if best == 0:
            if hard_lo is not None and lo - mpf(hard_lo) <= tol:
                raise NoMinimumError(f"minimum pinned at lower edge {lo}")
            if lo > 0:
                lo = lo / 8 if hard_lo is None else max(lo / 8, mpf(hard_lo))
                continue
            raise NoMinimumError(f"minimum pinned at lower edge {lo}")
        if best == len(xs) - 1:
            if hard_hi is not None and mpf(hard_hi) - hi <= tol:
                raise NoMinimumError(f"minimum pinned at upper edge {hi}")
            hi = hi * 4 if hard_hi is None else min(hi * 4, mpf(hard_hi))
            continue
        x, fx = golden_section(f, xs[best - 1], xs[best + 1], mpf(tol))
        return x, fx
    raise NoMinimumError("bracket expansion limit reached without interior minimum")


@dataclass(frozen=True)
class Min2DResult:
    x: object
    y: object
    fun: object
    boundary_pinned: bool


def _local_bracket(x, last_move, hard_lo, tol):
    scale = max(mpf(1), abs(x))
    if last_move is None:
        half = abs(x) / 2
    else:
        half = max(16 * last_move, mpf(10) ** 4 * tol * scale)
        half = min(half, abs(x) / 2)
    return max(hard_lo, x - half), x + half


def minimize_2d(f, start, bounds, tol, *, max_cycles=60, samples=24):
    """Coordinate descent with golden-section line minimizations.

    bounds is ((x_lo, x_hi), (y_lo, y_hi)); lower bounds are hard constraints,
    upper bounds expand as needed.  The first cycle scans the whole box; later
    cycles re-bracket around the current point and tighten the line tolerance
    down to tol (coarse-to-fine keeps the eval count manageable).  A minimum
    that stalls on a lower bound is reported with boundary_pinned=True rather
    than silently accepted.
    """
    (x_lo, x_hi), (y_lo, y_hi) = bounds
    x, y = mpf(start[0]), mpf(start[1])
    x_lo, x_hi, y_lo, y_hi = mpf(x_lo), mpf(x_hi), mpf(y_lo), mpf(y_hi)
    tol = mpf(tol)

    def line(g, lo, hi, hard_lo, cur_tol, cur_samples, fallback):
        try:
            t, _ = minimize_scalar(g, (lo, hi), cur_tol, samples=cur_samples,
                                   hard_lo=hard_lo)
            return t
        except NoMinimumError:
            return fallback  # pinned: stay put, flagged below

    fxy = f(x, y)
    cur_tol = max(tol, mpf("1e-2"))
    first = True
    move_x = move_y = None
    for _ in range(max_cycles):
        x_prev, y_prev = x, y
        if first:
            xb, yb = (x_lo, x_hi), (y_lo, y_hi)
            n_samples = samples
            first = False
        else:
            # re-bracket around the current point, width set by the last move;
            # minimize_scalar expands again if the minimum escapes the bracket
            xb = _local_bracket(x, move_x, x_lo, tol)
            yb = _local_bracket(y, move_y, y_lo, tol)
            n_samples = max(6, samples // 4)
        x = line(lambda t: f(t, y), xb[0], xb[1], x_lo, cur_tol, n_samples, x_lo)
        y = line(lambda t: f(x, t), yb[0], yb[1], y_lo, cur_tol, n_samples, y_lo)
        fxy = f(x, y)
        move_x, move_y = abs(x - x_prev), abs(y - y_prev)
        if cur_tol > tol:
            cur_tol = max(tol, cur_tol * mpf("1e-4"))
            continue
        if move_x <= tol * max(1, abs(x)) and move_y <= tol * max(1, abs(y)):
            break
    pin_tol = 100 * tol
    pinned = (abs(x - x_lo) <= pin_tol * max(1, abs(x_lo))
              or abs(y - y_lo) <= pin_tol * max(1, abs(y_lo)))
    return Min2DResult(x, y, fxy, pinned)

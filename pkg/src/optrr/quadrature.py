"""Adaptive tanh-sinh quadrature on half-infinite and infinite domains.

Thin wrapper over mpmath's quad with explicit error control; used as the
independent oracle for matrix elements and for moments of closed-form
wavefunctions (integrands decay at least like a Gaussian).
"""

from __future__ import annotations

from mpmath import inf, mp, mpf

from .precision import coerce, workdps

HALF_LINE = (0, inf)
FULL_LINE = (-inf, inf)


class QuadratureError(RuntimeError):
    def __init__(self, message, last_estimate=None):
        super().__init__(message)
        self.last_estimate = last_estimate


def integrate(f, domain, precision=None, points=()):
    """Integrate f over domain=(a, b), with optional interior break points.

    The estimated error must come in below 10x the precision's convergence
    tolerance (relative); otherwise the degree is raised and, failing that,
    a QuadratureError carrying the last estimate is raised.
    """
    cfg = coerce(precision)
    with workdps(cfg):
        a, b = domain
        path = [mpf(a) if a not in (inf, -inf) else a]
        for p in points:
            path.append(mpf(p))
        path.append(mpf(b) if b not in (inf, -inf) else b)
        tol = 10 * cfg.convergence_tol
        last = None
        for maxdegree in (None, 8, 10, 12):
            kwargs = {"error": True}
            if maxdegree is not None:
                kwargs["maxdegree"] = maxdegree
            value, err = mp.quad(f, path, **kwargs)
            last = value
            if err <= tol * max(mpf(1), abs(value)):
                return value
        raise QuadratureError(
            f"quadrature did not reach tolerance {tol} (error estimate {err})",
            last_estimate=last)

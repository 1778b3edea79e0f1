"""Dense symmetric matrices and an arbitrary-precision Jacobi eigensolver.

The eigensolver uses cyclic Jacobi rotations: they are precision-agnostic,
unconditionally stable for symmetric input, and deliver orthonormal
eigenvectors as a byproduct of the accumulated rotations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from mpmath import mpf, sqrt

from .precision import coerce, workdps


class LinalgError(RuntimeError):
    pass


class EighConvergenceError(LinalgError):
    def __init__(self, message, *, sweeps, off_norm, threshold):
        super().__init__(f"{message} (sweeps={sweeps}, off={off_norm}, threshold={threshold})")
        self.sweeps = sweeps
        self.off_norm = off_norm
        self.threshold = threshold


class SymMatrix:
    """Symmetric real matrix in packed lower-triangular storage.

    A single copy of each (i, j)/(j, i) pair is stored, so symmetry holds
    exactly by construction.
    """

    __slots__ = ("n", "_data")

    def __init__(self, n, data):
        if n < 1:
            raise ValueError("dimension must be >= 1")
        expected = n * (n + 1) // 2
        if len(data) != expected:
            raise ValueError(f"packed data length {len(data)} != {expected}")
        self.n = n
        self._data = list(data)

    @classmethod
    def zeros(cls, n):
        return cls(n, [mpf(0)] * (n * (n + 1) // 2))

    @classmethod
    def from_fn(cls, n, fn):
        data = []
        for i in range(n):
            for j in range(i + 1):
                data.append(fn(i, j))
        return cls(n, data)

    @classmethod
    def from_rows(cls, rows):
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError("rows must form a square matrix")
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"asymmetric input at ({i},{j})")
        return cls.from_fn(n, lambda i, j: rows[i][j])

    def _idx(self, i, j):
        if j > i:
            i, j = j, i
        return i * (i + 1) // 2 + j

    def get(self, i, j):
        return self._data[self._idx(i, j)]

    def set(self, i, j, value):
        self._data[self._idx(i, j)] = value

    def add(self, i, j, value):
        self._data[self._idx(i, j)] += value

    def to_rows(self):
        return [[self.get(i, j) for j in range(self.n)] for i in range(self.n)]

    def trace(self):
        return sum(self.get(i, i) for i in range(self.n))

    def max_abs(self):
        return max(abs(x) for x in self._data)

    def scaled_add(self, other, factor):
        """self += factor * other, entrywise on packed storage."""
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        for i, x in enumerate(other._data):
            if x:
                self._data[i] += factor * x
        return self


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    values: tuple
    vectors: tuple = field(default=())  # vectors[i] is the column for values[i]

    def vector(self, i):
        return self.vectors[i]


def _fix_signs(columns):
    fixed = []
    for col in columns:
        pivot = max(range(len(col)), key=lambda k: abs(col[k]))
        if col[pivot] < 0:
            col = tuple(-x for x in col)
        fixed.append(tuple(col))
    return fixed


def eigh(matrix: SymMatrix, precision=None, want_vectors=True) -> EigenDecomposition:
    """Diagonalize a symmetric matrix by cyclic Jacobi rotations.

    Returns ascending eigenvalues; eigenvector signs are fixed by making the
    largest-magnitude component positive, so output is deterministic for a
    fixed input and precision.
    """
    cfg = coerce(precision)
    with workdps(cfg):
        n = matrix.n
        a = matrix.to_rows()
        if n == 1:
            return EigenDecomposition((a[0][0],), ((mpf(1),),) if want_vectors else ())
        eps = mpf(10) ** (-(cfg.digits - 2))
        one, zero = mpf(1), mpf(0)
        v = None
        if want_vectors:
            v = [[one if i == j else zero for j in range(n)] for i in range(n)]
        anorm = max(max(abs(x) for x in row) for row in a)
        if anorm == 0:
            values = tuple(zero for _ in range(n))
            vecs = _fix_signs([tuple(one if k == i else zero for k in range(n)) for i in range(n)]) if want_vectors else ()
            return EigenDecomposition(values, tuple(vecs))
        thresh = anorm * eps
        max_sweeps = 24 + cfg.digits // 4
        converged = False
        sweeps = 0
        offmax = anorm
        for sweep in range(max_sweeps):
            sweeps = sweep + 1
            offmax = zero
            for i in range(n - 1):
                m = max(abs(x) for x in a[i][i + 1:])
                if m > offmax:
                    offmax = m
            if offmax <= thresh:
                converged = True
                break
            for p in range(n - 1):
                ap = a[p]
                for q in range(p + 1, n):
                    apq = ap[q]
                    if abs(apq) <= thresh:
                        continue
                    aq = a[q]
                    app = ap[p]
                    aqq = aq[q]
                    theta = (aqq - app) / (2 * apq)
                    t = 1 / (abs(theta) + sqrt(1 + theta * theta))
                    if theta < 0:
                        t = -t
                    c = 1 / sqrt(1 + t * t)
                    s = t * c
                    for k in range(n):
                        if k == p or k == q:
                            continue
                        akp = ap[k]
                        akq = aq[k]
                        ap[k] = a[k][p] = c * akp - s * akq
                        aq[k] = a[k][q] = s * akp + c * akq
                    ap[p] = app - t * apq
                    aq[q] = aqq + t * apq
                    ap[q] = aq[p] = zero
                    if v is not None:
                        for k in range(n):
                            vk = v[k]
                            vkp = vk[p]
                            vkq = vk[q]
                            vk[p] = c * vkp - s * vkq
                            vk[q] = s * vkp + c * vkq
        if not converged:
            raise EighConvergenceError(
                "Jacobi sweeps exhausted; matrix may be ill-conditioned at this precision",
                sweeps=sweeps, off_norm=offmax, threshold=thresh)
        order = sorted(range(n), key=lambda i: a[i][i])
        values = tuple(a[i][i] for i in order)
        if not want_vectors:
            return EigenDecomposition(values)
        columns = [[v[k][i] for k in range(n)] for i in order]
        return EigenDecomposition(values, tuple(_fix_signs(columns)))

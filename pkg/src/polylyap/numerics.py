"""Dense linear-algebra helpers.

Matrices are plain ``numpy.ndarray`` values. ``vec`` stacks columns
(column-major / Fortran order), which is the convention used by every
standard-form construction in this package.
"""
import warnings

import numpy as np
import scipy.linalg

ABS_FLOOR = 1e-12


class Singular(np.linalg.LinAlgError):
    """Raised when a factorisation meets a pivot below the singularity threshold."""


def as_matrix(a, name="matrix"):
    a = np.array(a, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def scale(a):
    """Max absolute entry, floored at ``ABS_FLOOR``."""
    a = np.asarray(a)
    if a.size == 0:
        return ABS_FLOOR
    return max(float(np.max(np.abs(a))), ABS_FLOOR)


def kron(a, b):
    return np.kron(np.atleast_2d(a), np.atleast_2d(b))


def vec(a):
    return np.asarray(a, dtype=float).reshape(-1, order="F")


def unvec(x, rows, cols):
    return np.asarray(x, dtype=float).reshape((rows, cols), order="F")


def lu_factor(a):
    """LU factorisation with partial pivoting; raises :class:`Singular`."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"lu_factor needs a square matrix, got shape {a.shape}")
    with warnings.catch_warnings():
        # Exact zero pivots are reported below as Singular.
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    thresh = ABS_FLOOR * scale(a)
    if a.shape[0] and np.min(np.abs(np.diag(lu))) < thresh:
        raise Singular(f"pivot below {thresh:.3g}")
    return lu, piv


def lu_solve(a, b):
    """Solve ``a x = b`` (``b`` may be a vector or a matrix of right-hand sides)."""
    return scipy.linalg.lu_solve(lu_factor(a), np.asarray(b, dtype=float), check_finite=False)

"""Dense complex linear algebra for the small (<= 64) matrices of the model.

Matrices are plain ``numpy`` complex arrays. The exponential is evaluated by
scaling and squaring: the argument is divided by ``2**s`` until its 1-norm is
at most 1/2, a Taylor series is summed until the next term no longer changes
the partial sum at double precision, and the result is squared ``s`` times.
For the well-scaled drifts of this model (norms far below 1) no squaring is
needed at all and the series converges in a dozen terms.
"""

import logging
import warnings

import numpy as np
import scipy.linalg

logger = logging.getLogger(__name__)

MAX_DIM = 64
PIVOT_TOL = 1e-14
_TAYLOR_NORM = 0.5
_MAX_TERMS = 40


class DimensionError(ValueError):
    """Matrix shapes do not fit the requested operation."""


class NumericError(ArithmeticError):
    """Non-finite values entered or left a computation."""


class SingularMatrixError(ArithmeticError):
    """Linear system is singular or numerically singular.

    Attributes
    ----------
    pivot : float
        Smallest pivot magnitude of the LU factorization, relative to the
        largest entry of the matrix.
    """

    def __init__(self, pivot, message=None):
        self.pivot = float(pivot)
        super().__init__(message or f"matrix is numerically singular (relative pivot {pivot:.3e})")


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def _require_square(a, name="matrix"):
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got {a.shape}")


def _require_finite(a, name="matrix"):
    if not np.all(np.isfinite(a)):
        raise NumericError(f"{name} has non-finite entries")


def expm(m) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a Taylor series.

    Parameters
    ----------
    m : array_like
        Square complex matrix of dimension at most ``MAX_DIM``.

    Returns
    -------
    ndarray
        ``exp(m)``.
    """
    a = as_matrix(m)
    _require_square(a)
    if a.shape[0] > MAX_DIM:
        raise DimensionError(f"dimension {a.shape[0]} exceeds {MAX_DIM}")
    _require_finite(a)

    n = a.shape[0]
    norm = np.linalg.norm(a, 1)
    s = 0
    if norm > _TAYLOR_NORM:
        s = int(np.ceil(np.log2(norm / _TAYLOR_NORM)))
    x = a / 2.0**s

    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, _MAX_TERMS + 1):
        term = term @ x / k
        result = result + term
        if np.linalg.norm(term, 1) <= np.finfo(float).eps * np.linalg.norm(result, 1):
            break
    for _ in range(s):
        result = result @ result

    _require_finite(result, "exp(m)")
    return result


def solve(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` by LU factorization with partial pivoting.

    Raises
    ------
    SingularMatrixError
        If the smallest pivot, relative to ``max|a_ij|``, is below ``PIVOT_TOL``.
    """
    a = as_matrix(a)
    b = np.asarray(b, dtype=complex)
    _require_square(a, "a")
    if b.shape[0] != a.shape[0]:
        raise DimensionError(f"right-hand side has {b.shape[0]} rows, expected {a.shape[0]}")
    _require_finite(a, "a")
    _require_finite(b, "b")

    scale = np.max(np.abs(a))
    if scale == 0.0:
        raise SingularMatrixError(0.0)
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrixError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivot = np.min(np.abs(np.diag(lu))) / scale
    if pivot < PIVOT_TOL:
        raise SingularMatrixError(pivot)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("solve: dim=%d cond=%.3e min pivot=%.3e", a.shape[0], np.linalg.cond(a), pivot)

    x = scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
    _require_finite(x, "solution")
    return x


def condition_number(a) -> float:
    return float(np.linalg.cond(as_matrix(a)))


def direct_sum(*blocks) -> np.ndarray:
    """Block-diagonal matrix ``diag(blocks[0], blocks[1], ...)``."""
    mats = [as_matrix(b) for b in blocks]
    for i, b in enumerate(mats):
        _require_square(b, f"block {i}")
    return scipy.linalg.block_diag(*mats).astype(complex)


def dagger(m) -> np.ndarray:
    return as_matrix(m).conj().T


def commutator_metric(n_pairs: int) -> np.ndarray:
    """Alternating ``diag(+1, -1, ...)`` over ``n_pairs`` (a, a^dagger) slot pairs."""
    return np.diag(np.tile([1.0, -1.0], n_pairs)).astype(complex)

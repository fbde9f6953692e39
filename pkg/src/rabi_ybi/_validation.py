"""Input validation helpers shared by the estimators and builders."""

import numbers

import numpy as np


def check_finite_scalar(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


def check_int(value, name, min_value=None, max_value=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if min_value is not None and value < min_value:
        raise ValueError(f"{name} must be >= {min_value}, got {value}")
    if max_value is not None and value > max_value:
        raise ValueError(f"{name} must be <= {max_value}, got {value}")
    return value


def check_square_matrix(matrix, name="matrix"):
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"{name} must be a square 2-d array, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError(f"{name} contains non-finite entries")
    return matrix


def hermiticity_defect(matrix):
    """Max-norm of ``A - A^dagger`` relative to the max-norm of ``A``."""
    matrix = np.asarray(matrix)
    scale = np.abs(matrix).max() if matrix.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.abs(matrix - matrix.conj().T).max() / scale)


def check_hermitian(matrix, tol=1e-12, name="matrix"):
    matrix = check_square_matrix(matrix, name)
    defect = hermiticity_defect(matrix)
    if defect > tol:
        raise ValueError(f"{name} is not Hermitian (relative defect {defect:.3e} > {tol:.1e})")
    return matrix


def check_levels(levels, name="levels"):
    """Return a sorted 1-d float array of finite energy levels."""
    from sklearn.utils.validation import check_array

    levels = check_array(
        np.asarray(levels, dtype=float).reshape(-1, 1), ensure_min_samples=0, input_name=name
    ).ravel()
    return np.sort(levels)

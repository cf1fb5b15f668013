"""Small dense complex-matrix kernel used by the precoder modules.

Everything here is value-semantics over numpy arrays and safe to call
concurrently.
"""

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DimensionMismatch, NotHermitian, SingularGram

# Relative eigenvalue gap below which a Gram matrix is treated as singular.
GRAM_RCOND = 1e-12

# All Hermitian matrices here are products of exact conjugates; a larger
# asymmetry indicates a bug upstream, not round-off.
HERMITIAN_RTOL = 1e-10


def frobenius_norm(a) -> float:
    a = np.asarray(a)
    return float(np.linalg.norm(a))


def left_pseudoinverse(a) -> np.ndarray:
    """(A^H A)^{-1} A^H for a tall full-column-rank A.

    The Gram matrix is inverted through a Cholesky solve rather than an
    explicit inverse. Raises SingularGram when the smallest Gram eigenvalue
    falls below GRAM_RCOND times the largest.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] < a.shape[1]:
        raise DimensionMismatch(f"expected a tall matrix, got shape {a.shape}")
    gram = a.conj().T @ a
    evals = np.linalg.eigvalsh(gram)
    if evals[-1] <= 0.0 or evals[0] < GRAM_RCOND * evals[-1]:
        raise SingularGram(
            f"gram eigenvalue ratio {evals[0]:.3e}/{evals[-1]:.3e} below {GRAM_RCOND:g}"
        )
    factor = cho_factor(gram, lower=True)
    return cho_solve(factor, a.conj().T)


def min_max_eigenvalues(h) -> tuple[float, float]:
    """Extreme eigenvalues of a Hermitian matrix, (smallest, largest)."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {h.shape}")
    asym = np.linalg.norm(h - h.conj().T)
    if asym > HERMITIAN_RTOL * max(np.linalg.norm(h), 1.0):
        raise NotHermitian(f"asymmetry {asym:.3e} exceeds tolerance")
    evals = np.linalg.eigvalsh(h)
    return float(evals[0]), float(evals[-1])

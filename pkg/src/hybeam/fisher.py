"""Fisher information, CRB, and the closed-form angle error bound.

The pilot matrix is never materialized: pilots are unit-modulus diagonal so
only their power sigma_s^2 enters the information matrix. The first unknown
is sin(theta); the remaining two are the real and imaginary parts of the
channel gain.
"""

from dataclasses import dataclass

import numpy as np

from .array_model import UlaGeometry, position_operator, steering
from .errors import DegenerateBound, DimensionMismatch, SingularFim

# Relative threshold below which the bound denominator (Schur complement of
# the gain block) is treated as zero, i.e. the precoder carries no usable
# angle information.
DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class ChannelState:
    theta: float
    beta: complex
    sigma_n: float
    sigma_s: float
    geom: UlaGeometry

    def __post_init__(self):
        if self.sigma_n <= 0.0:
            raise ValueError("sigma_n must be > 0")
        if self.sigma_s <= 0.0:
            raise ValueError("sigma_s must be > 0")
        if abs(self.beta) == 0.0:
            raise ValueError("channel gain must be nonzero")


def _beam_projections(f: np.ndarray, state: ChannelState):
    """Projections of the precoder columns onto a(theta) and D a(theta).

    Returns (v, w) with v = F^T a and w = F^T D a; every information
    quantity below is a quadratic form in these two vectors.
    """
    f = np.asarray(f)
    if f.ndim != 2 or f.shape[0] != state.geom.n_tx:
        raise DimensionMismatch(
            f"precoder has shape {f.shape}, expected {state.geom.n_tx} rows"
        )
    a = steering(state.geom, state.theta)
    da = position_operator(state.geom) * a
    return f.T @ a, f.T @ da


def fim(f, state: ChannelState) -> np.ndarray:
    """3x3 Fisher information matrix for (sin(theta), Re beta, Im beta)."""
    v, w = _beam_projections(f, state)
    r = state.geom.d_over_lambda
    s2 = state.sigma_s**2 / state.sigma_n**2
    beta = state.beta

    g = np.vdot(w, v)  # a^H D F* F^T a
    j11 = 8.0 * abs(beta) ** 2 * np.pi**2 * r**2 * s2 * np.vdot(w, w).real
    j12 = 4.0 * np.pi * r * s2 * (1j * np.conj(beta) * g).real
    j13 = -4.0 * np.pi * r * s2 * (np.conj(beta) * g).real
    j22 = 2.0 * s2 * np.vdot(v, v).real
    return np.array(
        [
            [j11, j12, j13],
            [j12, j22, 0.0],
            [j13, 0.0, j22],
        ]
    )


def crb(j) -> np.ndarray:
    """Inverse of the Fisher matrix; raises SingularFim when not invertible."""
    j = np.asarray(j, dtype=float)
    if j.shape != (3, 3):
        raise DimensionMismatch(f"expected a 3x3 matrix, got {j.shape}")
    evals = np.linalg.eigvalsh(j)
    if evals[-1] <= 0.0 or evals[0] < 1e-12 * evals[-1]:
        raise SingularFim(f"fisher eigenvalues {evals} not invertible")
    c = np.linalg.inv(j)
    return 0.5 * (c + c.T)


def aeb(f, state: ChannelState) -> float:
    """Closed-form angle error bound, sqrt of the (1,1) CRB entry.

    Computed directly from the beam projections: with alpha = ||v||^2,
    b = ||w||^2 and gamma = v^H w, the bound is
    prefactor * sqrt(alpha / (alpha*b - |gamma|^2)).
    """
    v, w = _beam_projections(f, state)
    alpha = np.vdot(v, v).real
    b = np.vdot(w, w).real
    gamma = np.vdot(v, w)
    denom = alpha * b - abs(gamma) ** 2
    scale = alpha * b
    if scale <= 0.0 or denom <= DEGENERATE_RTOL * scale:
        raise DegenerateBound(
            f"bound denominator {denom:.3e} vanishes (scale {scale:.3e})"
        )
    pref = state.sigma_n / (
        state.sigma_s * 2.0 * np.sqrt(2.0) * abs(state.beta) * np.pi * state.geom.d_over_lambda
    )
    return float(pref * np.sqrt(alpha / denom))

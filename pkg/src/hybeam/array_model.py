"""Uniform linear array geometry, steering vectors, and angle derivatives.

Angles are measured from broadside, valid on (-pi/2, pi/2). Element spacing
enters only through the ratio d/lambda.
"""

from dataclasses import dataclass

import numpy as np

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class UlaGeometry:
    n_tx: int
    d_over_lambda: float = 0.5

    def __post_init__(self):
        if self.n_tx < 1:
            raise ValueError(f"n_tx must be >= 1, got {self.n_tx}")
        if self.d_over_lambda <= 0.0:
            raise ValueError(f"d_over_lambda must be > 0, got {self.d_over_lambda}")


def position_operator(geom: UlaGeometry) -> np.ndarray:
    """Diagonal of the antenna position operator, diag{0, 1, ..., n_tx-1}."""
    return np.arange(geom.n_tx, dtype=float)


def _check_theta(theta: float):
    if not abs(theta) < np.pi / 2:
        raise ValueError(f"theta must lie in (-pi/2, pi/2), got {theta}")


def steering(geom: UlaGeometry, theta: float) -> np.ndarray:
    """Steering vector with entries exp(-j*2*pi*(d/lambda)*n*sin(theta))."""
    _check_theta(theta)
    n = position_operator(geom)
    return np.exp(-1j * _TWO_PI * geom.d_over_lambda * n * np.sin(theta))


def steering_deriv_sin_theta(geom: UlaGeometry, theta: float) -> np.ndarray:
    """Derivative of the steering vector with respect to sin(theta)."""
    _check_theta(theta)
    n = position_operator(geom)
    return -1j * _TWO_PI * geom.d_over_lambda * n * steering(geom, theta)


def steering_deriv_theta(geom: UlaGeometry, theta: float) -> np.ndarray:
    """Derivative of the steering vector with respect to theta (chain rule)."""
    return np.cos(theta) * steering_deriv_sin_theta(geom, theta)

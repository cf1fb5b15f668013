"""Analytic quantization-error bound for the phase-shifter resolution.

Quantizing the phases of an infinite-resolution RF factor perturbs each
entry by at most |1 - exp(j*pi/2^B)| in modulus, which bounds the growth of
the decomposition error by a constant times that factor.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BoundViolation, DimensionMismatch
from .hybrid import QuantizerSpec, quantize_phases
from .numerics import frobenius_norm

_BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class QuantBoundReport:
    bits: int | None
    factor: float  # |1 - exp(j*pi/2^B)|
    bound_constant: float  # sqrt(n_tx*n_rf) * ||F_rf*||_F * ||F_bb||_F
    true_error: float  # error of the unquantized factorization
    quantized_error: float  # error after phase quantization of F_rf*
    decp_ub: float  # true_error + bound_constant * factor

    def csv_row(self) -> dict:
        return {
            "B": "inf" if self.bits is None else self.bits,
            "factor": self.factor,
            "C": self.bound_constant,
            "true_error": self.true_error,
            "decp_ub": self.decp_ub,
        }


def quant_bound_factor(bits: int | None) -> float:
    """Worst-case per-entry phase rounding factor |1 - exp(j*pi/2^B)|."""
    if bits is None:
        return 0.0
    if bits < 1:
        raise ValueError(f"bits must be >= 1 or None, got {bits}")
    return float(abs(1.0 - np.exp(1j * np.pi / (1 << bits))))


def verify_quantization_bound(f_opt, f_rf_star, f_bb, bits: int | None) -> QuantBoundReport:
    """Check the quantized factorization against the analytic bound.

    f_rf_star / f_bb must come from an infinite-resolution decomposition
    run; the RF factor is re-quantized here to `bits` and the measured error
    increase is compared with the bound. A violation raises BoundViolation
    (it indicates a bug, not a modelling failure).
    """
    f_opt = np.asarray(f_opt)
    f_rf_star = np.asarray(f_rf_star)
    f_bb = np.asarray(f_bb)
    if f_rf_star.shape[0] != f_opt.shape[0] or f_rf_star.shape[1] != f_bb.shape[0]:
        raise DimensionMismatch(
            f"inconsistent shapes {f_opt.shape}, {f_rf_star.shape}, {f_bb.shape}"
        )
    n_tx, n_rf = f_rf_star.shape

    f_hat = np.exp(1j * quantize_phases(np.angle(f_rf_star), QuantizerSpec(bits))) / np.sqrt(n_tx)
    true_error = frobenius_norm(f_opt - f_rf_star @ f_bb)
    quantized_error = frobenius_norm(f_opt - f_hat @ f_bb)

    factor = quant_bound_factor(bits)
    constant = float(
        np.sqrt(n_tx * n_rf) * frobenius_norm(f_rf_star) * frobenius_norm(f_bb)
    )
    if quantized_error - true_error > constant * factor + _BOUND_SLACK:
        raise BoundViolation(
            f"quantized error {quantized_error:.6g} exceeds "
            f"{true_error:.6g} + {constant * factor:.6g}"
        )
    return QuantBoundReport(
        bits=bits,
        factor=factor,
        bound_constant=constant,
        true_error=true_error,
        quantized_error=quantized_error,
        decp_ub=true_error + constant * factor,
    )

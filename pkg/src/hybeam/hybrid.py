"""Alternating-optimization / ADMM decomposition of a digital precoder into
a quantized-phase RF factor and a power-normalized baseband factor.

Outer loop: closed-form least-squares baseband update, then an inner ADMM
pass over the RF factor with an auxiliary variable and scaled dual. The
augmented Lagrangian parameter follows the convergence rule
max{sqrt(2)*||F_bb F_bb^H||_F, ||F_bb||_F^2}, which makes the inner
Lagrangian trace monotone and bounded below by zero.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import SingularGram, ZeroBb
from .numerics import frobenius_norm, left_pseudoinverse

_TWO_PI = 2.0 * np.pi
_MAX_INIT_REDRAWS = 10


@dataclass(frozen=True)
class QuantizerSpec:
    """Phase-shifter bit budget; bits=None means infinite resolution."""

    bits: int | None

    def __post_init__(self):
        if self.bits is not None and self.bits < 1:
            raise ValueError(f"bits must be >= 1 or None, got {self.bits}")

    @property
    def infinite(self) -> bool:
        return self.bits is None


INFINITE_RESOLUTION = QuantizerSpec(bits=None)


@dataclass(frozen=True)
class HybridFactors:
    f_rf: np.ndarray  # n_tx x n_rf, entries of modulus 1/sqrt(n_tx)
    f_bb: np.ndarray  # n_rf x m


@dataclass
class AdmmState:
    f_rf: np.ndarray
    f_tilde: np.ndarray
    u: np.ndarray
    rho: float
    k: int = 0
    lagrangian_trace: list = field(default_factory=list)


@dataclass
class Diagnostics:
    """Per-iteration record of the decomposition run, JSON-serializable."""

    rho: list = field(default_factory=list)
    decp_err: list = field(default_factory=list)
    lagrangian: list = field(default_factory=list)  # one inner trace per outer pass
    init_redraws: int = 0
    decp_err_refit: float | None = None

    def to_dict(self) -> dict:
        out = {
            "rho": list(self.rho),
            "decp_err": list(self.decp_err),
            "lagrangian": [list(tr) for tr in self.lagrangian],
            "init_redraws": self.init_redraws,
        }
        if self.decp_err_refit is not None:
            out["decp_err_refit"] = self.decp_err_refit
        return out


def quantize_phases(phases, spec: QuantizerSpec) -> np.ndarray:
    """Round phases to the nearest grid point 2*pi*b/2^B on the circle.

    Exact midpoints round to the smaller grid index. Infinite resolution is
    the identity.
    """
    phases = np.asarray(phases, dtype=float)
    if spec.infinite:
        return phases.copy()
    step = _TWO_PI / (1 << spec.bits)
    idx = np.mod(np.ceil(phases / step - 0.5), 1 << spec.bits)
    return step * idx


def random_feasible_rf(rng: np.random.Generator, n_tx: int, n_rf: int, spec: QuantizerSpec) -> np.ndarray:
    """Draw an RF factor i.i.d. uniform from the feasible phase set."""
    if spec.infinite:
        phases = rng.uniform(0.0, _TWO_PI, size=(n_tx, n_rf))
    else:
        step = _TWO_PI / (1 << spec.bits)
        phases = step * rng.integers(0, 1 << spec.bits, size=(n_tx, n_rf))
    return np.exp(1j * phases) / np.sqrt(n_tx)


def bb_update(f_rf, f_opt, total_power: float) -> np.ndarray:
    """Least-squares baseband factor, rescaled to the power constraint."""
    pinv = left_pseudoinverse(f_rf)
    x = pinv @ f_opt
    scale = frobenius_norm(f_rf @ x)
    if scale == 0.0:
        raise ZeroBb("digital precoder is orthogonal to the RF column space")
    return (np.sqrt(total_power) / scale) * x


def rho_rule(f_bb) -> float:
    """Lagrangian parameter guaranteeing monotone, bounded inner iterations."""
    f_bb = np.asarray(f_bb)
    norm = frobenius_norm(f_bb)
    if norm == 0.0:
        raise ZeroBb("baseband factor is zero")
    return max(np.sqrt(2.0) * frobenius_norm(f_bb @ f_bb.conj().T), norm**2)


def augmented_lagrangian(f_tilde, f_rf, u, rho: float, f_opt, f_bb) -> float:
    fit = 0.5 * frobenius_norm(f_opt - f_tilde @ f_bb) ** 2
    penalty = 0.5 * rho * (
        frobenius_norm(f_tilde - f_rf + u) ** 2 - frobenius_norm(u) ** 2
    )
    return float(fit + penalty)


def admm_step(state: AdmmState, f_opt, f_bb, spec: QuantizerSpec, solve=None) -> AdmmState:
    """One primal/auxiliary/dual update of the inner ADMM.

    `solve` maps R to R (F_bb F_bb^H + rho I)^{-1}; when omitted it is
    factored on the fly (the outer loop passes a cached factorization).
    """
    n_tx = state.f_rf.shape[0]
    f_rf = np.exp(1j * quantize_phases(np.angle(state.f_tilde + state.u), spec)) / np.sqrt(n_tx)
    if solve is None:
        solve = _make_solver(f_bb, state.rho)
    f_tilde = solve(f_opt @ f_bb.conj().T + state.rho * (f_rf - state.u))
    u = state.u + f_tilde - f_rf
    trace = state.lagrangian_trace + [
        augmented_lagrangian(f_tilde, f_rf, u, state.rho, f_opt, f_bb)
    ]
    return AdmmState(
        f_rf=f_rf,
        f_tilde=f_tilde,
        u=u,
        rho=state.rho,
        k=state.k + 1,
        lagrangian_trace=trace,
    )


def _make_solver(f_bb, rho: float):
    n_rf = f_bb.shape[0]
    factor = cho_factor(f_bb @ f_bb.conj().T + rho * np.eye(n_rf), lower=True)

    def solve(rhs):
        # rhs @ (F_bb F_bb^H + rho I)^{-1}, via the Hermitian factorization
        return cho_solve(factor, rhs.conj().T).conj().T

    return solve


def decomposition_error(f_opt, factors: HybridFactors) -> float:
    """Relative Frobenius error of the factorization."""
    f_opt = np.asarray(f_opt)
    return frobenius_norm(f_opt - factors.f_rf @ factors.f_bb) / frobenius_norm(f_opt)


def alt_opt_ls_admm(
    f_opt,
    n_rf: int,
    total_power: float,
    spec: QuantizerSpec,
    *,
    i_max: int = 10,
    k_max: int = 50,
    seed=None,
    rng: np.random.Generator | None = None,
    extra_bb_refit: bool = False,
) -> tuple[HybridFactors, Diagnostics]:
    """Decompose f_opt into quantized-phase RF and baseband factors.

    Runs i_max outer passes; each pass recomputes the baseband factor in
    closed form, sets rho from the convergence rule, runs k_max inner ADMM
    steps, and quantizes the auxiliary variable into the next RF factor.
    The inner pass warm-starts the auxiliary variable at the current RF
    factor (with zero dual), so a pair that already factorizes exactly is a
    fixed point of the whole loop, and iterates over the unquantized
    unit-modulus set; the bit budget is enforced when the outer update
    rounds the converged auxiliary phases onto the B-bit grid. Running the
    inner projection on the quantized grid directly freezes the RF factor
    at its random starting point (the dual correction is too small to push
    any phase across a grid boundary once rho satisfies the convergence
    rule), which contradicts the known behavior of the method; see the
    repository notes. A singular random RF initialization is re-drawn (at
    most 10 times).

    extra_bb_refit additionally reports the error after one more baseband
    update against the final RF factor (diagnostic only; the returned
    factors are untouched).
    """
    f_opt = np.asarray(f_opt, dtype=complex)
    n_tx, m = f_opt.shape
    if not 1 <= n_rf <= n_tx:
        raise ValueError(f"n_rf must be in [1, {n_tx}], got {n_rf}")
    if i_max < 1 or k_max < 1:
        raise ValueError("i_max and k_max must be >= 1")
    power = frobenius_norm(f_opt) ** 2
    if abs(power - total_power) > 1e-9 * total_power:
        warnings.warn(
            f"||f_opt||_F^2 = {power:.6g} != P = {total_power:.6g}; renormalizing",
            stacklevel=2,
        )
        f_opt = f_opt * np.sqrt(total_power / power)

    if rng is None:
        rng = np.random.default_rng(seed)
    diag = Diagnostics()
    f_rf = random_feasible_rf(rng, n_tx, n_rf, spec)

    f_bb = None
    for _ in range(i_max):
        for attempt in range(_MAX_INIT_REDRAWS + 1):
            try:
                f_bb = bb_update(f_rf, f_opt, total_power)
                break
            except SingularGram:
                if attempt == _MAX_INIT_REDRAWS:
                    raise
                f_rf = random_feasible_rf(rng, n_tx, n_rf, spec)
                diag.init_redraws += 1
        rho = rho_rule(f_bb)
        solve = _make_solver(f_bb, rho)
        state = AdmmState(f_rf=f_rf, f_tilde=f_rf.copy(), u=np.zeros_like(f_rf), rho=rho)
        for _k in range(k_max):
            state = admm_step(state, f_opt, f_bb, INFINITE_RESOLUTION, solve=solve)
        f_rf = np.exp(1j * quantize_phases(np.angle(state.f_tilde), spec)) / np.sqrt(n_tx)

        diag.rho.append(float(rho))
        diag.lagrangian.append(state.lagrangian_trace)
        diag.decp_err.append(decomposition_error(f_opt, HybridFactors(f_rf, f_bb)))

    # The returned pair must satisfy the transmit power constraint even when
    # the final RF factor moved after the last baseband update; a scalar
    # rescale restores it without touching the decomposition geometry.
    scale = frobenius_norm(f_rf @ f_bb)
    if scale == 0.0:
        raise ZeroBb("final factor product vanished")
    f_bb = (np.sqrt(total_power) / scale) * f_bb
    factors = HybridFactors(f_rf=f_rf, f_bb=f_bb)
    if extra_bb_refit:
        refit = HybridFactors(f_rf, bb_update(f_rf, f_opt, total_power))
        diag.decp_err_refit = decomposition_error(f_opt, refit)
    return factors, diag

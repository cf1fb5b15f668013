"""Directional/derivative beam codebook and robust beam power allocation.

The fully digital precoder is a power-weighted codebook: the worst-case
angle error bound over the uncertainty grid is minimized over nonnegative
per-beam powers on the transmit-power hyperplane. The min-max is solved by
projected subgradient descent on a log-sum-exp smoothing of the max, with
the smoothing temperature annealed during the run.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .array_model import UlaGeometry, position_operator, steering, steering_deriv_theta
from .errors import InfeasibleGrid, TooFewPilots
from .fisher import ChannelState

DEFAULT_HALF_WIDTH = np.deg2rad(5.0)


@dataclass(frozen=True)
class UncertaintySet:
    """Angle interval (radians) for one user: center +/- half_width."""

    center: float
    half_width: float = DEFAULT_HALF_WIDTH

    def grid(self, count: int) -> np.ndarray:
        """Uniform grid spanning [center - hw, center + hw) with count points."""
        if count < 1:
            raise ValueError("grid count must be >= 1")
        step = 2.0 * self.half_width / count
        return self.center - self.half_width + step * np.arange(count)


@dataclass(frozen=True)
class Codebook:
    beams: np.ndarray  # n_tx x m, blocks (direc_1, deriv_1, ..., direc_L, deriv_L)
    grid_angles: np.ndarray  # flat, one angle per grid point, UE-major
    ue_count: int
    points_per_ue: int

    @property
    def m_pilots(self) -> int:
        return self.beams.shape[1]

    def column_powers(self) -> np.ndarray:
        return np.sum(np.abs(self.beams) ** 2, axis=0)


@dataclass(frozen=True)
class PowerAllocation:
    q: np.ndarray  # nonnegative per-beam power weights


def build_codebook(
    geom: UlaGeometry,
    uncertainty: Sequence[UncertaintySet],
    m_pilots: int,
) -> Codebook:
    """Stack directional and derivative beams over each user's angle grid."""
    ue_count = len(uncertainty)
    if ue_count < 1:
        raise ValueError("need at least one uncertainty set")
    if m_pilots < 2 * ue_count or m_pilots % (2 * ue_count) != 0:
        raise TooFewPilots(
            f"m_pilots={m_pilots} must be a positive multiple of 2*L={2 * ue_count}"
        )
    g = m_pilots // (2 * ue_count)

    blocks = []
    angles = []
    for u in uncertainty:
        grid = u.grid(g)
        if not np.all(np.abs(grid) < np.pi / 2):
            raise ValueError("grid points must lie strictly inside (-pi/2, pi/2)")
        blocks.append(np.column_stack([steering(geom, t) for t in grid]))
        blocks.append(np.column_stack([steering_deriv_theta(geom, t) for t in grid]))
        angles.append(grid)
    return Codebook(
        beams=np.hstack(blocks),
        grid_angles=np.concatenate(angles),
        ue_count=ue_count,
        points_per_ue=g,
    )


def _grid_coefficients(cb: Codebook, states: Sequence[ChannelState]):
    """Per grid point, the linear-in-q coefficients of the bound quantities.

    For F(q) = beams * diag(sqrt(q)): alpha = A q, b = B q, gamma = G q,
    with AEB = pref * sqrt(alpha / (alpha*b - |gamma|^2)).
    """
    a_rows, b_rows, g_rows, prefs = [], [], [], []
    for st in states:
        a = steering(st.geom, st.theta)
        da = position_operator(st.geom) * a
        v0 = cb.beams.T @ a
        w0 = cb.beams.T @ da
        a_rows.append(np.abs(v0) ** 2)
        b_rows.append(np.abs(w0) ** 2)
        g_rows.append(np.conj(v0) * w0)
        prefs.append(
            st.sigma_n
            / (st.sigma_s * 2.0 * np.sqrt(2.0) * abs(st.beta) * np.pi * st.geom.d_over_lambda)
        )
    return (
        np.array(a_rows),
        np.array(b_rows),
        np.array(g_rows),
        np.array(prefs),
    )


def _aeb_per_point(q, coeffs):
    acoef, bcoef, gcoef, prefs = coeffs
    alpha = acoef @ q
    b = bcoef @ q
    gamma = gcoef @ q
    denom = alpha * b - np.abs(gamma) ** 2
    out = np.full(alpha.shape, np.inf)
    ok = (alpha > 0) & (denom > 0)
    out[ok] = prefs[ok] * np.sqrt(alpha[ok] / denom[ok])
    return out


def max_grid_aeb(cb: Codebook, q, states: Sequence[ChannelState]) -> float:
    """Worst-case bound over the grid for a given power allocation."""
    coeffs = _grid_coefficients(cb, states)
    return float(np.max(_aeb_per_point(np.asarray(q, dtype=float), coeffs)))


def _project(w):
    """Clip to nonnegative and rescale onto the unit power-fraction plane."""
    w = np.maximum(w, 0.0)
    total = w.sum()
    if total <= 0.0:
        return np.full_like(w, 1.0 / w.size)
    return w / total


def optimize_power_allocation(
    cb: Codebook,
    states: Sequence[ChannelState],
    total_power: float,
    *,
    max_iters: int = 10_000,
    rel_tol: float = 1e-7,
    patience: int = 50,
    anneal_every: int = 200,
) -> PowerAllocation:
    """Minimize the worst-case grid bound over the power simplex.

    Projected subgradient on the log-sum-exp smoothed max; temperature
    starts at 0.1x the uniform-allocation objective and halves every
    anneal_every iterations. The search runs over power fractions (the
    share of the budget each beam spends), which puts directional and
    derivative columns on the same scale regardless of their very
    different norms. The returned allocation is the best feasible iterate,
    so it is never worse than the uniform starting point.
    """
    if total_power <= 0.0:
        raise ValueError("total_power must be > 0")
    coeffs = _grid_coefficients(cb, states)
    acoef, bcoef, gcoef, prefs = coeffs
    col_powers = cb.column_powers()
    if np.any(col_powers <= 0.0):
        raise ValueError("codebook contains a zero column")

    def to_q(w):
        return total_power * w / col_powers

    w = _project(np.ones(cb.m_pilots))
    vals = _aeb_per_point(to_q(w), coeffs)
    if not np.all(np.isfinite(vals)):
        raise InfeasibleGrid(
            "a grid point is unidentifiable under uniform power allocation"
        )
    best_w = w.copy()
    best_obj = float(vals.max())
    tau = 0.1 * best_obj

    since_improve = 0
    for t in range(1, max_iters + 1):
        q = to_q(w)
        alpha = acoef @ q
        b = bcoef @ q
        gamma = gcoef @ q
        denom = alpha * b - np.abs(gamma) ** 2
        aeb_vals = prefs * np.sqrt(alpha / denom)

        # Softmax weights over grid points at the current temperature.
        z = aeb_vals / tau
        z -= z.max()
        weights = np.exp(z)
        weights /= weights.sum()

        # d(AEB_g)/dq = AEB_g * (dalpha/(2 alpha) - ddenom/(2 denom)),
        # then chain rule dq/dw = P/col_powers.
        ddenom = (
            acoef * b[:, None]
            + bcoef * alpha[:, None]
            - 2.0 * np.real(np.conj(gamma)[:, None] * gcoef)
        )
        grads = aeb_vals[:, None] * (
            acoef / (2.0 * alpha[:, None]) - ddenom / (2.0 * denom[:, None])
        )
        grad = (weights @ grads) * (total_power / col_powers)
        norm = np.linalg.norm(grad)
        if norm == 0.0:
            break
        step = 0.1 * np.linalg.norm(w) / np.sqrt(t)
        w = _project(w - step * grad / norm)

        obj = float(_aeb_per_point(to_q(w), coeffs).max())
        if obj < best_obj * (1.0 - rel_tol):
            best_obj = obj
            best_w = w.copy()
            since_improve = 0
        else:
            if obj < best_obj:
                best_obj = obj
                best_w = w.copy()
            since_improve += 1
            if since_improve >= patience:
                break
        if t % anneal_every == 0:
            tau *= 0.5

    best_w = _polish(best_w, coeffs, col_powers, total_power)
    return PowerAllocation(q=to_q(best_w))


def _polish(w0, coeffs, col_powers, total_power):
    """Refine the subgradient solution with a smooth constrained solver.

    Minimizes the log-sum-exp smoothed worst case over the fraction
    simplex at progressively smaller temperatures, keeping the result only
    when the true worst case improves.
    """

    def raw(w):
        return float(
            _aeb_per_point(total_power * np.maximum(w, 0.0) / col_powers, coeffs).max()
        )

    w = w0.copy()
    base = raw(w)
    for tau in (base * 1e-2, base * 1e-3, base * 1e-4):
        def smoothed(w):
            q = total_power * np.maximum(w, 1e-14) / col_powers
            vals = _aeb_per_point(q, coeffs)
            m = vals.max()
            return m + tau * np.log(np.exp((vals - m) / tau).sum())

        res = minimize(
            smoothed,
            w,
            method="SLSQP",
            bounds=[(0.0, 1.0)] * w.size,
            constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1.0}],
            options={"maxiter": 200, "ftol": 1e-14},
        )
        if res.success:
            cand = np.maximum(res.x, 0.0)
            cand /= cand.sum()
            if raw(cand) < raw(w):
                w = cand
    return w


def assemble_f_opt(cb: Codebook, alloc: PowerAllocation) -> np.ndarray:
    """Scale the codebook columns by the optimized amplitude weights."""
    q = np.asarray(alloc.q, dtype=float)
    if q.shape != (cb.m_pilots,) or np.any(q < 0):
        raise ValueError("allocation must be a nonnegative vector of length m_pilots")
    f = cb.beams * np.sqrt(q)[None, :]
    return f

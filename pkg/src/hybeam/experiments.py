"""Seeded Monte-Carlo sweeps: decomposition error, angle error bounds, and
quantization-bound curves, emitted as CSV rows plus per-trial JSON archives.

Determinism contract: identical config + seed produce byte-identical CSV.
Wall-clock timings therefore live in a separate file. Each trial draws from
its own counter-derived RNG substream, so results do not depend on
execution order and trials can run in a process pool.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .array_model import UlaGeometry
from .digital import (
    UncertaintySet,
    assemble_f_opt,
    build_codebook,
    optimize_power_allocation,
)
from .errors import ConfigError, DegenerateBound
from .fisher import ChannelState, aeb
from .hybrid import QuantizerSpec, alt_opt_ls_admm, decomposition_error
from .numerics import frobenius_norm
from .quantization import quant_bound_factor, verify_quantization_bound

CSV_COLUMNS = ("sweep_name", "sweep_value", "method", "metric", "mean", "std", "trials", "seed")

SCENARIOS = ("decomp", "aeb", "quantbound")
SWEEPS = ("n_rf", "bits", "n_tx", "aod")


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    sweep: str
    sweep_values: tuple
    n_tx: int = 16
    n_rf: int = 8
    m_pilots: int = 20
    p_dbm: float = 10.0
    bits: int | None = None  # None = infinite resolution
    snr_db: float = 10.0
    aod_deg: float = 0.0
    ue_angles_deg: tuple = (0.0,)
    trials: int = 50
    seed: int = 0
    i_max: int = 10
    k_max: int = 50
    half_width_deg: float = 5.0
    d_over_lambda: float = 0.5
    jobs: int = 1

    def validate(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}, expected one of {SCENARIOS}")
        if self.sweep not in SWEEPS:
            raise ConfigError(f"unknown sweep {self.sweep!r}, expected one of {SWEEPS}")
        if not self.sweep_values:
            raise ConfigError("sweep_values must be non-empty")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.n_tx < 1 or not 1 <= self.n_rf:
            raise ConfigError("n_tx and n_rf must be >= 1")
        if self.m_pilots < 2:
            raise ConfigError("m_pilots must be >= 2")
        if self.i_max < 1 or self.k_max < 1:
            raise ConfigError("i_max and k_max must be >= 1")
        if len(self.ue_angles_deg) not in (1, 2):
            raise ConfigError("ue_angles_deg supports 1 or 2 users")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    @property
    def power_watts(self) -> float:
        return dbm_to_watts(self.p_dbm)

    @property
    def sigma_n(self) -> float:
        # SNR convention: snr = sigma_s^2 |beta|^2 P / sigma_n^2 at the
        # nominal unit gain and unit pilot amplitude.
        snr = 10.0 ** (self.snr_db / 10.0)
        return float(np.sqrt(self.power_watts / snr))


@dataclass(frozen=True)
class ResultRow:
    sweep_name: str
    sweep_value: object
    method: str
    metric: str
    mean: float
    std: float
    trials: int
    seed: int
    wall_time_ms: float = 0.0


def dbm_to_watts(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def parse_bits(text) -> int | None:
    if text is None or str(text).lower() in ("inf", "infinite", "none"):
        return None
    return int(text)


def format_value(v) -> str:
    if v is None:
        return "inf"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def rows_to_csv(rows) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in sorted(rows, key=lambda r: (r.sweep_name, format_value(r.sweep_value), r.method, r.metric)):
        lines.append(
            ",".join(
                (
                    r.sweep_name,
                    format_value(r.sweep_value),
                    r.method,
                    r.metric,
                    f"{r.mean:.12g}",
                    f"{r.std:.12g}",
                    str(r.trials),
                    str(r.seed),
                )
            )
        )
    return "\n".join(lines) + "\n"


def _map(fn, args_list, jobs: int):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, args_list))
    return [fn(a) for a in args_list]


def _random_f_opt(rng, n_tx: int, m: int, power: float) -> np.ndarray:
    f = rng.standard_normal((n_tx, m)) + 1j * rng.standard_normal((n_tx, m))
    return f * (np.sqrt(power) / frobenius_norm(f))


def _stats(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std(ddof=1)) if arr.size > 1 else 0.0


# ---------------------------------------------------------------------------
# Scenario I: decomposition error for random digital precoders


def _decomp_trial(args):
    n_tx, n_rf, m, power, bits, i_max, k_max, seed_key = args
    rng = np.random.default_rng(seed_key)
    f_opt = _random_f_opt(rng, n_tx, m, power)
    factors, _ = alt_opt_ls_admm(
        f_opt, n_rf, power, QuantizerSpec(bits), i_max=i_max, k_max=k_max, rng=rng
    )
    return decomposition_error(f_opt, factors)


def run_scenario1(cfg: ExperimentConfig):
    """Decomposition-error sweep over n_rf or bits for random precoders."""
    cfg.validate()
    if cfg.scenario != "decomp":
        raise ConfigError(f"scenario {cfg.scenario!r} does not match decomp runner")
    if cfg.sweep not in ("n_rf", "bits"):
        raise ConfigError("decomp sweeps support sweep in {n_rf, bits}")

    rows, archive, timings = [], {}, []
    for value in cfg.sweep_values:
        n_rf = int(value) if cfg.sweep == "n_rf" else cfg.n_rf
        bits = parse_bits(value) if cfg.sweep == "bits" else cfg.bits
        if n_rf > cfg.n_tx:
            raise ConfigError(f"n_rf={n_rf} exceeds n_tx={cfg.n_tx}")
        # Trials are keyed by counter only, not by sweep value, so every
        # sweep value sees the same precoder draws (paired comparisons).
        args = [
            (cfg.n_tx, n_rf, cfg.m_pilots, cfg.power_watts, bits, cfg.i_max, cfg.k_max,
             [cfg.seed, t])
            for t in range(cfg.trials)
        ]
        t0 = time.perf_counter()
        errs = _map(_decomp_trial, args, cfg.jobs)
        elapsed = (time.perf_counter() - t0) * 1e3
        mean, std = _stats(errs)
        rows.append(
            ResultRow(cfg.sweep, value, "altopt-ls-admm", "decp_err", mean, std,
                      cfg.trials, cfg.seed, elapsed)
        )
        archive[format_value(value)] = {"decp_err": [float(e) for e in errs]}
        timings.append({"sweep_value": format_value(value), "wall_time_ms": elapsed})
    return rows, archive, timings


# ---------------------------------------------------------------------------
# Scenario II: angle error bounds for designed precoders


def design_digital_precoder(
    geom: UlaGeometry,
    centers_rad,
    m_pilots: int,
    power: float,
    sigma_n: float,
    sigma_s: float = 1.0,
    beta: complex = 1.0 + 0.0j,
    half_width: float = np.deg2rad(5.0),
) -> np.ndarray:
    """Step-1 design: codebook + robust power allocation -> digital precoder."""
    unc = [UncertaintySet(c, half_width) for c in centers_rad]
    cb = build_codebook(geom, unc, m_pilots)
    states = [
        ChannelState(theta=t, beta=beta, sigma_n=sigma_n, sigma_s=sigma_s, geom=geom)
        for t in cb.grid_angles
    ]
    alloc = optimize_power_allocation(cb, states, power)
    return assemble_f_opt(cb, alloc)


def _safe_aeb(f, state) -> float:
    # Degenerate rows are flagged with inf, never dropped.
    try:
        return aeb(f, state)
    except DegenerateBound:
        return float("inf")


def _aeb_trial(args):
    (f_opt, n_rf, power, bits, i_max, k_max, seed_key, eval_states) = args
    rng = np.random.default_rng(seed_key)
    factors, _ = alt_opt_ls_admm(
        f_opt, n_rf, power, QuantizerSpec(bits), i_max=i_max, k_max=k_max, rng=rng
    )
    f_hyb = factors.f_rf @ factors.f_bb
    return [_safe_aeb(f_hyb, st) for st in eval_states]


def _designs_for(cfg: ExperimentConfig):
    angles = [np.deg2rad(a) for a in cfg.ue_angles_deg]
    if len(angles) == 1:
        return [("", angles)]
    return [
        ("-design-ue1", angles[:1]),
        ("-design-ue2", angles[1:]),
        ("-design-both", angles),
    ]


def run_scenario2(cfg: ExperimentConfig):
    """AEB sweep: digital design vs its hybrid decomposition, per UE."""
    cfg.validate()
    if cfg.scenario != "aeb":
        raise ConfigError(f"scenario {cfg.scenario!r} does not match aeb runner")

    rows, archive, timings = [], {}, []
    for value in cfg.sweep_values:
        eff = cfg
        if cfg.sweep == "n_tx":
            eff = replace(cfg, n_tx=int(value))
        elif cfg.sweep == "n_rf":
            eff = replace(cfg, n_rf=int(value))
        elif cfg.sweep == "bits":
            eff = replace(cfg, bits=parse_bits(value))
        elif cfg.sweep == "aod":
            eff = replace(cfg, aod_deg=float(value))
        if eff.n_rf > eff.n_tx:
            raise ConfigError(f"n_rf={eff.n_rf} exceeds n_tx={eff.n_tx}")

        geom = UlaGeometry(eff.n_tx, eff.d_over_lambda)
        sigma_n = eff.sigma_n
        multi = len(cfg.ue_angles_deg) > 1
        if multi:
            eval_angles = [np.deg2rad(a) for a in cfg.ue_angles_deg]
            metrics = [f"aeb_ue{k + 1}" for k in range(len(eval_angles))]
        else:
            eval_angles = [np.deg2rad(eff.aod_deg)]
            metrics = ["aeb"]
        eval_states = [
            ChannelState(theta=t, beta=1.0 + 0.0j, sigma_n=sigma_n, sigma_s=1.0, geom=geom)
            for t in eval_angles
        ]

        value_archive = {}
        t0 = time.perf_counter()
        for di, (suffix, centers) in enumerate(_designs_for(eff)):
            f_opt = design_digital_precoder(
                geom, centers, eff.m_pilots, eff.power_watts, sigma_n,
                half_width=np.deg2rad(eff.half_width_deg),
            )
            digital = [_safe_aeb(f_opt, st) for st in eval_states]
            for metric, val in zip(metrics, digital):
                rows.append(
                    ResultRow(cfg.sweep, value, "digital" + suffix, metric,
                              val, 0.0, 1, cfg.seed)
                )
                value_archive[f"digital{suffix}/{metric}"] = [val]

            args = [
                (f_opt, eff.n_rf, eff.power_watts, eff.bits, eff.i_max, eff.k_max,
                 [cfg.seed, di, t], eval_states)
                for t in range(cfg.trials)
            ]
            per_trial = _map(_aeb_trial, args, cfg.jobs)
            for mi, metric in enumerate(metrics):
                vals = [trial[mi] for trial in per_trial]
                mean, std = _stats(vals)
                rows.append(
                    ResultRow(cfg.sweep, value, "hybrid" + suffix, metric,
                              mean, std, cfg.trials, cfg.seed)
                )
                value_archive[f"hybrid{suffix}/{metric}"] = [float(v) for v in vals]
        elapsed = (time.perf_counter() - t0) * 1e3
        archive[format_value(value)] = value_archive
        timings.append({"sweep_value": format_value(value), "wall_time_ms": elapsed})
    return rows, archive, timings


# ---------------------------------------------------------------------------
# Quantization-bound curves (analytic bound vs measured errors)


def _quantbound_trial(args):
    n_tx, n_rf, m, power, bits_values, i_max, k_max, seed_key = args
    rng = np.random.default_rng(seed_key)
    f_opt = _random_f_opt(rng, n_tx, m, power)
    factors, _ = alt_opt_ls_admm(
        f_opt, n_rf, power, QuantizerSpec(None), i_max=i_max, k_max=k_max, rng=rng
    )
    out = []
    for bits in bits_values:
        rep = verify_quantization_bound(f_opt, factors.f_rf, factors.f_bb, bits)
        out.append((rep.true_error, rep.quantized_error, rep.decp_ub, rep.bound_constant))
    return out


def run_quant_bound(cfg: ExperimentConfig):
    """Analytic decomposition-error upper bound vs bits, Monte-Carlo averaged."""
    cfg.validate()
    if cfg.scenario != "quantbound":
        raise ConfigError(f"scenario {cfg.scenario!r} does not match quantbound runner")
    if cfg.sweep != "bits":
        raise ConfigError("quantbound sweeps only over bits")
    bits_values = [parse_bits(v) for v in cfg.sweep_values]

    args = [
        (cfg.n_tx, cfg.n_rf, cfg.m_pilots, cfg.power_watts, bits_values,
         cfg.i_max, cfg.k_max, [cfg.seed, t])
        for t in range(cfg.trials)
    ]
    t0 = time.perf_counter()
    per_trial = _map(_quantbound_trial, args, cfg.jobs)
    elapsed = (time.perf_counter() - t0) * 1e3

    rows, archive = [], {}
    report_rows = []
    for bi, (value, bits) in enumerate(zip(cfg.sweep_values, bits_values)):
        true_errs = [tr[bi][0] for tr in per_trial]
        q_errs = [tr[bi][1] for tr in per_trial]
        ubs = [tr[bi][2] for tr in per_trial]
        consts = [tr[bi][3] for tr in per_trial]
        for metric, vals in (
            ("true_error", true_errs),
            ("quantized_error", q_errs),
            ("decp_ub", ubs),
        ):
            mean, std = _stats(vals)
            rows.append(
                ResultRow(cfg.sweep, value, "altopt-ls-admm", metric, mean, std,
                          cfg.trials, cfg.seed, elapsed)
            )
        archive[format_value(value)] = {
            "true_error": true_errs,
            "quantized_error": q_errs,
            "decp_ub": ubs,
            "bound_constant": consts,
        }
        report_rows.append(
            {
                "B": format_value(value),
                "factor": quant_bound_factor(bits),
                "C": float(np.mean(consts)),
                "true_error": float(np.mean(true_errs)),
                "decp_ub": float(np.mean(ubs)),
            }
        )
    timings = [{"sweep_value": "all", "wall_time_ms": elapsed}]
    return rows, archive, timings, report_rows


# ---------------------------------------------------------------------------
# One-shot design dump


def run_design(cfg: ExperimentConfig) -> dict:
    """Design a digital precoder, decompose it once, and dump everything."""
    cfg.validate()
    geom = UlaGeometry(cfg.n_tx, cfg.d_over_lambda)
    centers = [np.deg2rad(a) for a in cfg.ue_angles_deg]
    f_opt = design_digital_precoder(
        geom, centers, cfg.m_pilots, cfg.power_watts, cfg.sigma_n,
        half_width=np.deg2rad(cfg.half_width_deg),
    )
    rng = np.random.default_rng([cfg.seed])
    factors, diag = alt_opt_ls_admm(
        f_opt, cfg.n_rf, cfg.power_watts, QuantizerSpec(cfg.bits),
        i_max=cfg.i_max, k_max=cfg.k_max, rng=rng,
    )
    eval_state = ChannelState(
        theta=np.deg2rad(cfg.aod_deg), beta=1.0 + 0.0j,
        sigma_n=cfg.sigma_n, sigma_s=1.0, geom=geom,
    )
    return {
        "config": {
            "n_tx": cfg.n_tx, "n_rf": cfg.n_rf, "m_pilots": cfg.m_pilots,
            "p_dbm": cfg.p_dbm, "bits": format_value(cfg.bits),
            "snr_db": cfg.snr_db, "ue_angles_deg": list(cfg.ue_angles_deg),
            "aod_deg": cfg.aod_deg, "seed": cfg.seed,
        },
        "f_opt": _complex_to_json(f_opt),
        "f_rf": _complex_to_json(factors.f_rf),
        "f_bb": _complex_to_json(factors.f_bb),
        "decp_err": decomposition_error(f_opt, factors),
        "aeb_digital": _safe_aeb(f_opt, eval_state),
        "aeb_hybrid": _safe_aeb(factors.f_rf @ factors.f_bb, eval_state),
        "diagnostics": diag.to_dict(),
    }


def _complex_to_json(a: np.ndarray) -> dict:
    return {"real": np.real(a).tolist(), "imag": np.imag(a).tolist()}

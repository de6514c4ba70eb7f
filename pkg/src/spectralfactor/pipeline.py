"""Run configuration, pipeline stages and report assembly behind the CLI.

Every stage takes a resolved :class:`RunConfig`, writes its CSV artifacts
into the output directory and returns a plain dictionary that becomes (part
of) a JSON report.  :func:`run` drives one subcommand end to end and maps
outcomes onto exit codes:

``0``  every configured check passed
``1``  a check failed
``2``  invalid configuration or input
``3``  a numerical diagnostic stopped a stage
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import io
from .approx import ERROR_FLOOR, approximant, error_sweep, rate_fit
from .errors import DomainError, SpectralError
from .factorization import (
    DELTA_MIN,
    TOL_CAUSAL,
    TOL_RECON,
    check_admissible,
    factorize,
)
from .models import Model, build_model, from_density
from .pathology import (
    PROBE_RADII,
    disk_algebra_gap,
    gamma_divergence_probe,
    make_pathological_gamma,
    outer_divergence_probe,
)
from .simulate import (
    GENERATOR,
    SimulationResult,
    mse_experiment,
    periodogram_check,
    sample_autocorrelation,
    simulate_process,
    whiteness_experiment,
)
from .spectra import CausalSeries, FrequencyGrid, holder_fit
from .wiener import gamma, spectral_mse, toeplitz_fir_oracle, wiener_filter

__all__ = [
    "EXIT_OK",
    "EXIT_CHECK_FAILED",
    "EXIT_USAGE",
    "EXIT_DIAGNOSTIC",
    "SUBCOMMANDS",
    "RunConfig",
    "ConfigError",
    "load_config",
    "resolve_model",
    "run",
]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DIAGNOSTIC = 3

SUBCOMMANDS = ("factor", "wiener", "approx", "rate", "probe", "simulate", "pipeline")
PIPELINE_NS = (8, 16, 32, 64)
RATE_NS = (8, 16, 32, 64, 128, 256, 512)
PROBE_MIN_CELLS = 14


class ConfigError(DomainError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    """Resolved settings of one CLI run.

    ``params`` holds model parameters; any configuration key that is not a
    field of this class is treated as one.
    """

    subcommand: str = "pipeline"
    model: str = "ar1_plus_noise"
    params: dict = field(default_factory=dict)
    boundary: Optional[str] = None
    cross: Optional[str] = None
    rx0: Optional[float] = None
    cosine: Optional[List[float]] = None
    series: Optional[str] = None
    M: int = 4096
    K: int = 256
    N: Optional[List[int]] = None
    kind: str = "vallee_poussin"
    target: str = "H"
    seed: int = 0
    out: str = "out"
    floor: float = ERROR_FLOOR
    density_floor: float = 0.0
    probe_kind: str = "both"
    radii: List[float] = field(default_factory=lambda: list(PROBE_RADII))
    theta: List[float] = field(default_factory=lambda: [0.0])
    terms: int = 4096
    construction: str = "slow_log_modulus"
    n: int = 2 ** 17
    replicas: int = 16
    oracle_L: int = 64
    tol_recon: float = TOL_RECON
    tol_causal: float = TOL_CAUSAL
    delta_min: float = DELTA_MIN

    def validate(self) -> "RunConfig":
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        for name in ("tol_recon", "tol_causal", "delta_min", "floor"):
            if not float(getattr(self, name)) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.M < 8 or self.M & (self.M - 1):
            raise ConfigError(f"M must be a power of two >= 8, got {self.M}")
        if self.K < 0:
            raise ConfigError("K must be nonnegative")
        if self.N is not None and any(int(x) < 0 for x in self.N):
            raise ConfigError("N values must be nonnegative")
        if self.seed is None or int(self.seed) < 0:
            raise ConfigError("a nonnegative integer seed is required")
        if self.replicas < 2:
            raise ConfigError("at least two replicas are needed for standard errors")
        if self.density_floor < 0:
            raise ConfigError("density_floor must be nonnegative")
        if self.probe_kind not in ("outer", "gamma", "both"):
            raise ConfigError(f"unknown probe kind {self.probe_kind!r}")
        if self.cross is not None and self.rx0 is None:
            raise ConfigError("a cross-spectrum file needs rx0, the variance of the desired signal")
        if sum(x is not None for x in (self.boundary, self.cosine)) > 1:
            raise ConfigError("give at most one of boundary and cosine")
        return self

    def public(self) -> dict:
        """Configuration echoed into reports (the output path is left out)."""
        d = asdict(self)
        d.pop("out")
        return d


_FIELDS = {f.name for f in fields(RunConfig)}


def load_config(path: Optional[str], overrides: dict) -> RunConfig:
    """Merge a flat JSON configuration file with command-line overrides.

    Keys that are not :class:`RunConfig` fields are model parameters; a
    ``params`` object is merged as well.  Overrides win.  Without an
    explicit model the ``probe`` subcommand uses the pathological density.
    """
    raw: dict = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    params = dict(raw.pop("params", {}) or {})
    for key in [k for k in raw if k not in _FIELDS]:
        params[key] = raw.pop(key)
    params.update(overrides.pop("params", {}) or {})
    raw.update({k: v for k, v in overrides.items() if v is not None})
    raw["params"] = params
    if raw.get("subcommand") == "probe" and not any(raw.get(k) is not None for k in ("model", "cosine", "boundary")):
        raw["model"] = "pathological"
    try:
        cfg = RunConfig(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()


# --------------------------------------------------------------------------
# model resolution


def resolve_model(cfg: RunConfig, M: Optional[int] = None) -> Model:
    """Builtin model, cosine-coefficient density or CSV input on an ``M``-point grid.

    A positive ``density_floor`` is added to ``phi`` as extra white
    observation noise, leaving ``psi`` unchanged.
    """
    eps = cfg.density_floor
    if cfg.boundary is not None:
        dens = io.read_boundary_csv(cfg.boundary)
        psi = None
        if cfg.cross is not None:
            psi = io.read_boundary_csv(cfg.cross)
            if psi.grid != dens.grid:
                raise ConfigError("density and cross-spectrum files have different grids")
        return from_density(dens, Path(cfg.boundary).stem, psi, cfg.rx0, density_floor=eps)
    grid = FrequencyGrid(cfg.M if M is None else M)
    if cfg.cosine is not None:
        return build_model("cosine", grid, coeffs=list(cfg.cosine), density_floor=eps, **cfg.params)
    params = dict(cfg.params)
    if cfg.model == "pathological":
        params.setdefault("terms", cfg.terms)
        params.setdefault("kind", cfg.construction)
    return build_model(cfg.model, grid, density_floor=eps, **params)


def _tols(cfg: RunConfig) -> dict:
    return dict(tol_recon=cfg.tol_recon, tol_causal=cfg.tol_causal, delta_min=cfg.delta_min)


def _out(cfg: RunConfig, name: str) -> Path:
    return Path(cfg.out) / name


def _check(passed: bool, **detail) -> dict:
    return dict(passed=bool(passed), **detail)


# --------------------------------------------------------------------------
# stages


def stage_factor(cfg: RunConfig, model: Model) -> dict:
    dens = model.density
    adm = check_admissible(dens, cfg.delta_min)
    F, factors, hw = factorize(dens, **_tols(cfg))
    io.write_series_csv(_out(cfg, "phi_plus.csv"), factors.phi_plus.truncate(min(cfg.K, F.degree)))
    io.write_series_csv(_out(cfg, "whitening.csv"), hw.truncate(min(cfg.K, hw.degree)))
    io.write_boundary_csv(_out(cfg, "density.csv"), dens.boundary)
    ident = float(np.max(np.abs(factors.product() - dens.values)) / np.max(dens.values))
    return {
        "M": dens.grid.size,
        "K": cfg.K,
        "delta": adm.delta,
        "omega_min": adm.omega_min,
        "pw_integral": adm.pw_integral,
        "recon_residual": F.recon_residual,
        "factorization_residual": ident,
        "truncation_energy": F.truncation_energy,
        "anticausal_leakage": factors.leakage,
        "whitening_sup": float(np.max(np.abs(hw.boundary(dens.grid).values))),
        "holder_alpha_hat": holder_fit(factors.phi_plus_boundary).exponent,
        "phi_plus_head": factors.phi_plus.real_if_close()[:8],
        "whitening_head": hw.real_if_close()[:8],
    }


def _wiener(cfg: RunConfig, model: Model):
    K = min(cfg.K, model.grid.max_half_width)
    return wiener_filter(model.density, model.cross, K=K, **_tols(cfg))


def stage_wiener(cfg: RunConfig, model: Model, sol=None) -> dict:
    sol = sol or _wiener(cfg, model)
    io.write_series_csv(_out(cfg, "hw.csv"), sol.H_W.truncate(min(cfg.K, sol.H_W.degree)))
    io.write_series_csv(_out(cfg, "he.csv"), sol.H_E)
    io.write_series_csv(_out(cfg, "h.csv"), sol.H)
    grid = model.grid
    L = min(cfg.oracle_L, grid.size // 4)
    orc = toeplitz_fir_oracle(model.density, model.cross, model.rx0, L)
    return {
        "K": sol.K,
        "tail_energy": sol.tail_energy,
        f"mmse_oracle_L{L}": orc.mmse,
        "oracle_L": L,
        "oracle_condition": orc.condition,
        "mmse_spectral": spectral_mse(sol.H, model.density, model.cross, model.rx0),
        "rx0": model.rx0,
        "holder_alpha_hat_HE": holder_fit(sol.gamma_plus.boundary(grid)).exponent,
        "holder_alpha_hat_H": holder_fit(sol.H_full.boundary(grid)).exponent,
        "h_head": sol.H.real_if_close()[:8],
    }


def _target_series(cfg: RunConfig, model: Model, sol=None) -> CausalSeries:
    if cfg.series is not None:
        return io.read_series_csv(cfg.series)
    sol = sol or _wiener(cfg, model)
    targets = {"H": sol.H_full, "HW": sol.H_W, "HE": sol.gamma_plus}
    try:
        return targets[cfg.target]
    except KeyError:
        raise ConfigError(f"unknown target {cfg.target!r}; choose from {sorted(targets)}") from None


def _rate_block(Ns, errs, floor) -> dict:
    rep = {"N": list(Ns), "error": errs, "floor": floor}
    try:
        fit = rate_fit(Ns, errs, floor=floor)
    except DomainError as exc:
        rep.update(alpha_hat=None, C_hat=None, residual=None, used=None, fit_error=str(exc))
    else:
        rep.update(alpha_hat=fit.alpha_hat, C_hat=fit.C_hat, residual=fit.residual, used=fit.used)
    return rep


def _max_parameter(kind: str, degree_cap: int) -> int:
    return (degree_cap + 1) // 2 if kind in ("vallee_poussin", "vp") else degree_cap


def stage_approx(cfg: RunConfig, model: Optional[Model], H: Optional[CausalSeries] = None) -> dict:
    H = H if H is not None else _target_series(cfg, model)
    Ns = list(cfg.N) if cfg.N else list(PIPELINE_NS)
    paths = []
    for n in Ns:
        P = approximant(H, n, cfg.kind)
        paths.append(io.write_series_csv(_out(cfg, f"approx_{P.kind}_N{n}.csv"), P.series).name)
    errs = error_sweep(H, Ns, cfg.kind)
    rep = _rate_block(Ns, errs, cfg.floor)
    rep.update(kind=cfg.kind, files=paths, target=cfg.series or cfg.target)
    return rep


def stage_rate(cfg: RunConfig, model: Optional[Model], H: Optional[CausalSeries] = None) -> dict:
    H = H if H is not None else _target_series(cfg, model)
    cap = _max_parameter(cfg.kind, H.degree)
    Ns = [n for n in (cfg.N or RATE_NS) if n <= cap]
    errs = error_sweep(H, Ns, cfg.kind)
    rep = _rate_block(Ns, errs, cfg.floor)
    rep.update(kind=cfg.kind, target=cfg.series or cfg.target)
    if model is not None and model.holder_alpha is not None:
        a = model.holder_alpha
        rep["holder_alpha"] = a
        rep["jackson_check"] = _check(rep["alpha_hat"] is not None and rep["alpha_hat"] >= a - 0.15,
                                      lower=a - 0.15)
    return rep


def probe_grid_size(cfg: RunConfig) -> int:
    """Smallest admissible grid at least ``cfg.M`` that resolves the probe radii and terms."""
    M = cfg.M
    rmax = max(cfg.radii)
    if not 0 <= min(cfg.radii) and rmax < 1:
        raise ConfigError("radii must lie in [0, 1)")
    need = PROBE_MIN_CELLS / (1.0 - rmax)
    if cfg.model == "pathological" and cfg.boundary is None:
        need = max(need, 2 * cfg.terms + 2)
    while M < need:
        M *= 2
    return M


def _trace_dict(rec) -> dict:
    d = {
        "theta": rec.theta,
        "radii": rec.radii,
        "abs_values": rec.values,
        "increments": rec.increments,
        "nondecreasing": rec.nondecreasing,
        "shrinking": rec.shrinking(),
        "max_value": rec.max_value,
    }
    if rec.F_values is not None:
        d.update(u=rec.extra["u"], v=rec.extra["v"], F_re=rec.F_values.real, F_im=rec.F_values.imag,
                 F_oscillation=rec.oscillation, phi_theta=rec.phi_theta)
    return d


def stage_probe(cfg: RunConfig) -> dict:
    radii = sorted(float(r) for r in cfg.radii)
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ConfigError("radii must be distinct")
    M = probe_grid_size(cfg)
    model = resolve_model(cfg, M)
    dens = model.density
    grid = dens.grid
    rep: dict = {"M": grid.size, "radii": radii, "model": model.name}
    if cfg.probe_kind in ("outer", "both"):
        rep["outer"] = [_trace_dict(outer_divergence_probe(dens, t, radii)) for t in cfg.theta]
        F, _, _ = factorize(dens, **_tols(cfg))
        gap = disk_algebra_gap(F.F_plus_boundary)
        rep["disk_algebra_gap"] = {"gap": gap.gap, "winner": gap.winner, "norm": gap.norm,
                                   "errors": gap.errors, "r_probe": gap.r_probe}
    if cfg.probe_kind == "outer":
        return rep
    if model.name == "pathological":
        G = make_pathological_gamma(cfg.terms, grid, kind="sine")
        rep["gamma_source"] = "sine series sum_k sin(k omega)/(k log k)"
    else:
        _, factors, _ = factorize(dens, **_tols(cfg))
        G = gamma(model.cross, factors)
        rep["gamma_source"] = "psi / phi_minus"
    rep["gamma"] = [_trace_dict(gamma_divergence_probe(G, t, radii)) for t in cfg.theta]
    return rep


def stage_simulate(cfg: RunConfig, model: Model) -> dict:
    dens = model.density
    x = simulate_process(dens, cfg.n, cfg.seed, K=cfg.K)
    pg = periodogram_check(x, dens)
    io.write_columns_csv(_out(cfg, "periodogram.csv"), ("omega", "estimate", "reference"),
                         pg.omega, pg.estimate, pg.reference)
    wh = whiteness_experiment(dens, cfg.n, cfg.seed, cfg.replicas, K=cfg.K)
    return {
        "n": cfg.n,
        "replicas": cfg.replicas,
        "seed": cfg.seed,
        "generator": GENERATOR,
        "sample_autocorr": sample_autocorrelation(x),
        "periodogram_fraction": pg.fraction,
        "periodogram_segments": pg.segments,
        "whitened_autocorr_mean": wh.mean,
        "whiteness_bound": wh.bound,
        "whiteness_exceedances": wh.exceedances,
        "checks": {
            "periodogram": _check(pg.fraction >= 0.95, fraction=pg.fraction),
            "whiteness": _check(wh.passed, max_abs=float(np.max(np.abs(wh.mean))), bound=wh.bound),
        },
    }


def stage_pipeline(cfg: RunConfig, model: Model, report: dict) -> dict:
    """factor -> wiener -> V_N sweep -> simulation -> cascade MSE and checks."""
    checks: Dict[str, dict] = {}
    report["stage"] = "factor"
    report["factor"] = stage_factor(cfg, model)
    report["stage"] = "wiener"
    sol = _wiener(cfg, model)
    report["wiener"] = stage_wiener(cfg, model, sol)
    report["stage"] = "approx"
    H = sol.H_full
    Ns = list(cfg.N) if cfg.N else list(PIPELINE_NS)
    filters = {f"N{n}": approximant(H, n, cfg.kind).series for n in Ns}
    for n in Ns:
        io.write_series_csv(_out(cfg, f"cascade_N{n}.csv"), filters[f"N{n}"])
    report["approx"] = {"N": Ns, "kind": cfg.kind, "error": error_sweep(H, Ns, cfg.kind)}
    report["rate"] = stage_rate(cfg, model, H)
    if "jackson_check" in report["rate"]:
        checks["jackson_rate"] = report["rate"]["jackson_check"]

    report["stage"] = "simulate"
    wh = whiteness_experiment(model.density, cfg.n, cfg.seed, cfg.replicas, K=cfg.K)
    checks["whiteness"] = _check(wh.passed, max_abs=float(np.max(np.abs(wh.mean))), bound=wh.bound,
                                 exceedances=wh.exceedances)
    if not model.simulable:
        raise ConfigError("simulation needs a builtin model or a density without cross-spectrum")
    mse = mse_experiment(model.signal_density, model.noise_var, filters, cfg.n, cfg.seed,
                         cfg.replicas, K=cfg.K)
    spectral = {k: spectral_mse(f, model.density, model.cross, model.rx0) for k, f in filters.items()}
    report["mse"] = {k: {"mean": v.mean, "se": v.se, "spectral": spectral[k], "replicas": v.replicas}
                     for k, v in mse.items()}

    L = report["wiener"]["oracle_L"]
    mmse = report["wiener"][f"mmse_oracle_L{L}"]
    top = f"N{max(Ns)}"
    slack = 3.0 * mse[top].se + 1e-6 * model.rx0
    checks["mse_vs_oracle"] = _check(abs(mse[top].mean - mmse) <= slack, filter=top,
                                     realized=mse[top].mean, oracle=mmse, tolerance=slack)
    order = sorted(Ns)
    viol = []
    for a, b in zip(order, order[1:]):
        ea, eb = mse[f"N{a}"], mse[f"N{b}"]
        if eb.mean > ea.mean + 2.0 * max(ea.se, eb.se) + 1e-12 * model.rx0:
            viol.append([a, b])
    checks["mse_ordering"] = _check(not viol, violations=viol)

    sim = SimulationResult(cfg.n, mse[top].mean, mse[top].se, mmse, wh.mean.real, cfg.seed, cfg.replicas)
    report["simulation"] = {
        "n": sim.n, "mse": sim.mse, "mse_se": sim.mse_se, "mmse_ref": sim.mmse_ref,
        "whitened_autocorr": sim.autocorr, "seed": sim.seed, "replicas": sim.replicas,
        "generator": sim.generator,
    }
    report.pop("stage")
    return checks


# --------------------------------------------------------------------------
# driver


def _wrap(cfg: RunConfig, command: str, body: dict) -> dict:
    return {"command": command, "config": cfg.public(), **body}


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


REPORT_NAMES = {
    "factor": "factor_report.json",
    "wiener": "wiener_report.json",
    "approx": "rate_report.json",
    "rate": "rate_report.json",
    "probe": "probe_report.json",
    "simulate": "simulate_report.json",
    "pipeline": "pipeline_report.json",
}


def run(cfg: RunConfig) -> int:
    """Execute ``cfg.subcommand`` and write its report; return the exit code."""
    cmd = cfg.subcommand
    report = _wrap(cfg, cmd, {"status": "ok", "timestamp": _timestamp()})
    path = _out(cfg, REPORT_NAMES[cmd])
    code = EXIT_OK
    try:
        checks: Dict[str, dict] = {}
        if cmd == "probe":
            report["stage"] = "probe"
            report.update(stage_probe(cfg))
        else:
            report["stage"] = "model"
            model = resolve_model(cfg) if cfg.series is None or cmd not in ("approx", "rate") else None
            report["stage"] = cmd
            if cmd == "factor":
                report.update(stage_factor(cfg, model))
            elif cmd == "wiener":
                report.update(stage_wiener(cfg, model))
            elif cmd == "approx":
                report.update(stage_approx(cfg, model))
            elif cmd == "rate":
                body = stage_rate(cfg, model)
                if "jackson_check" in body:
                    checks["jackson_rate"] = body.pop("jackson_check")
                report.update(body)
            elif cmd == "simulate":
                body = stage_simulate(cfg, model)
                checks.update(body.pop("checks"))
                report.update(body)
            else:
                checks = stage_pipeline(cfg, model, report)
        report.pop("stage", None)
        report["checks"] = checks
        if not all(c["passed"] for c in checks.values()):
            report["status"] = "check_failed"
            code = EXIT_CHECK_FAILED
    except (ConfigError, DomainError, OSError) as exc:
        report.update(status="usage_error", error={"type": type(exc).__name__, "message": str(exc)})
        code = EXIT_USAGE
    except (SpectralError, FloatingPointError, np.linalg.LinAlgError) as exc:
        err = {"type": type(exc).__name__, "message": str(exc)}
        for attr in ("residual", "tolerance", "omega", "value"):
            if getattr(exc, attr, None) is not None:
                err[attr] = getattr(exc, attr)
        report.update(status="diagnostic_error", error=err)
        code = EXIT_DIAGNOSTIC
    io.write_report(path, report)
    return code

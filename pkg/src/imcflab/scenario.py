"""Scenario configuration, batch execution and artifact persistence.

A scenario is described by a JSON config (keys below), runs the flow with
spectral and pinching observers attached, executes the configured check
battery, and leaves a self-contained artifact directory:

    config.json          validated config actually used
    series.csv           fixed column order:
                         t, area, H_min, H_max, pinch_margin, eps_t, lambda1,
                         lambda1_p, lambda1_rescaled, decay_bound,
                         rescaled_monotone_q, sphericity
    snapshots/           OFF meshes (surface) / x,y CSV curves (curve),
                         named snapshot_t<value> with t formatted %.6f
    eigenfunctions/      per-vertex CSV per sample and p
    report.json          array of check outcomes (+ top-level status)
    summary.md           human-readable table

Identical config and seed give byte-identical series.csv and report.json;
all randomness is split off the single config seed.
"""

from __future__ import annotations

import json
import os
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import flow as flow_mod
from . import verify as verify_mod
from .errors import HypothesisViolationError, ImcflabError
from .flow import IMCF, MCF, FlowConfig, FlowTrace, eigen_rescale
from .geometry import (
    Ellipsoid,
    PerturbedSphere,
    Sphere,
    StarSurface,
    build_atlas,
    compute_tensors,
    embed,
    read_curve_csv,
    read_off,
    write_curve_csv,
    write_off,
)
from .spectral import (
    PLaplaceConfig,
    assemble,
    lambda1_laplace,
    lambda1_plaplace,
    write_eigenfunction_csv,
)
from .verify import CheckReport, PinchSchedule, alpha_max

__all__ = [
    "ScenarioConfig",
    "RunArtifact",
    "parse_config",
    "config_from_dict",
    "run_scenario",
    "sweep",
    "emit_report",
    "SERIES_COLUMNS",
    "ALL_CHECKS",
]

SERIES_COLUMNS = [
    "t", "area", "H_min", "H_max", "pinch_margin", "eps_t", "lambda1",
    "lambda1_p", "lambda1_rescaled", "decay_bound", "rescaled_monotone_q",
    "sphericity",
]

ALL_CHECKS = [
    "area_growth",
    "monotone",
    "decay_bound",
    "rescaled_monotone",
    "rescaled_decay_schedule",
    "pinching",
    "rounding",
    "isoperimetric",
    "evolution_identity",
    "h_decay",
]

_CONFIG_KEYS = {
    "backend", "shape", "resolution", "speed", "dt", "cfl_factor", "t_end",
    "sample_interval", "p", "alpha", "checks", "tolerances", "seed", "out",
}

_SHAPE_KEYS = {
    "sphere": {"radius"},
    "ellipsoid": {"a", "b", "c"},
    "perturbed_sphere": {"radius", "amplitude"},
}


@dataclass
class ScenarioConfig:
    backend: str = "surface"
    shape: dict = field(default_factory=lambda: {"kind": "sphere", "radius": 1.0})
    resolution: int = 3
    speed: str = "imcf"
    dt: float | None = None
    cfl_factor: float | None = None
    t_end: float = 1.0
    sample_interval: float | None = None
    p: list = field(default_factory=lambda: [2.0])
    alpha: object = "auto"
    checks: object = "all"
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    out: str | None = None

    @property
    def n(self) -> int:
        return 1 if self.backend == "curve" else 2

    def validate(self) -> None:
        if self.backend not in ("curve", "surface"):
            raise ValueError(f"backend must be curve or surface, got {self.backend!r}")
        if self.speed not in ("imcf", "mcf"):
            raise ValueError(f"speed must be imcf or mcf, got {self.speed!r}")
        if self.t_end <= 0:
            raise ValueError("t_end must be positive (bound: t_end > 0)")
        if self.sample_interval is not None and not (
                0 < self.sample_interval <= self.t_end):
            raise ValueError("sample_interval must lie in (0, t_end]")
        if self.dt is not None and self.cfl_factor is not None:
            raise ValueError("set at most one of dt and cfl_factor")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        kind = self.shape.get("kind")
        if kind not in _SHAPE_KEYS:
            raise ValueError(f"unknown shape kind {kind!r}")
        extra = set(self.shape) - _SHAPE_KEYS[kind] - {"kind"}
        if extra:
            raise ValueError(f"unknown shape key {sorted(extra)[0]!r}")
        if not self.p:
            raise ValueError("p list must not be empty")
        for pv in self.p:
            if pv <= 1:
                raise ValueError(f"p values must exceed 1, got {pv}")
        if self.alpha != "auto":
            bound = 2.0 / self.n
            if not (0.0 < float(self.alpha) <= bound):
                raise ValueError(
                    f"alpha = {self.alpha} outside (0, {bound:g}] for n={self.n}")
        if self.checks != "all":
            unknown = [c for c in self.checks if c not in ALL_CHECKS]
            if unknown:
                raise ValueError(f"unknown check {unknown[0]!r}")

    @property
    def check_list(self) -> list:
        return list(ALL_CHECKS) if self.checks == "all" else list(self.checks)

    def flow_config(self) -> FlowConfig:
        dt, cfl = self.dt, self.cfl_factor
        if dt is None and cfl is None:
            cfl = 0.2
        return FlowConfig(
            t_end=self.t_end, dt=dt, cfl_factor=cfl,
            sample_interval=self.sample_interval or self.t_end / 50.0,
        )

    def build_surface(self) -> StarSurface:
        atlas = build_atlas("circle" if self.backend == "curve" else "icosphere",
                            self.resolution)
        kind = self.shape["kind"]
        if kind == "sphere":
            profile = Sphere(self.shape.get("radius", 1.0))
        elif kind == "ellipsoid":
            profile = Ellipsoid(
                self.shape.get("a", 1.0), self.shape.get("b", 1.0),
                self.shape.get("c") if self.backend == "surface" else None)
        else:
            profile = PerturbedSphere(
                self.shape.get("radius", 1.0), self.shape.get("amplitude", 0.0),
                seed=int(np.random.SeedSequence(self.seed).spawn(1)[0].generate_state(1)[0]))
        return embed(atlas, profile)


def config_from_dict(data: dict) -> ScenarioConfig:
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config key {sorted(unknown)[0]!r}")
    cfg = ScenarioConfig(**{k: v for k, v in data.items()})
    cfg.validate()
    return cfg


def parse_config(path) -> ScenarioConfig:
    """Load and validate a JSON scenario config, filling defaults."""
    with open(path) as fh:
        data = json.load(fh)
    return config_from_dict(data)


# ---------------------------------------------------------------------------
# observers
# ---------------------------------------------------------------------------


class _SpectralObserver:
    """Samples lambda_1 (and the first p != 2 eigenvalue) along the run."""

    def __init__(self, config: ScenarioConfig, eps0: float | None):
        self.p_extra = next((p for p in config.p if p != 2.0), None)
        self.eps0 = eps0
        self.n = config.n
        self.seed = config.seed
        self.lam0 = None
        self.prev_u = None
        self.prev_u_p = None
        self.eigenfunctions = []  # (t, p, u) saved for the artifact

    def __call__(self, t, surface, tensors):
        res = lambda1_laplace(assemble(surface, tensors))
        self.prev_u = res.eigenfunction
        self.eigenfunctions.append((t, 2.0, res.eigenfunction))
        lam = res.eigenvalue
        if self.lam0 is None:
            self.lam0 = lam
        lam_tilde = eigen_rescale(lam, t, self.n, 2.0)
        row = {
            "lambda1": lam,
            "lambda1_rescaled": lam_tilde,
        }
        if self.eps0 is not None:
            row["decay_bound"] = self.lam0 * np.exp(-2.0 * self.eps0 * t)
            row["rescaled_monotone_q"] = (
                np.exp(-2.0 * (1.0 / self.n - self.eps0) * t) * lam_tilde)
        if self.p_extra is not None:
            cfg = PLaplaceConfig(p=self.p_extra, restarts=3, max_iter=1000,
                                 grad_tol=1e-8, seed=self.seed)
            extra = () if self.prev_u_p is None else (self.prev_u_p,)
            res_p = lambda1_plaplace(surface, tensors, cfg, extra_starts=extra)
            self.prev_u_p = res_p.eigenfunction
            self.eigenfunctions.append((t, self.p_extra, res_p.eigenfunction))
            row["lambda1_p"] = res_p.eigenvalue
        return row


class _PinchObserver:
    def __init__(self, schedule: PinchSchedule | None):
        self.schedule = schedule

    def __call__(self, t, surface, tensors):
        if self.schedule is None:
            return {"pinch_margin": np.nan, "eps_t": np.nan}
        eps = float(self.schedule.epsilon(t))
        try:
            margin = verify_mod.pinching_margin(tensors, eps)
        except HypothesisViolationError:
            margin = np.nan
        return {"pinch_margin": margin, "eps_t": eps}


# ---------------------------------------------------------------------------
# artifact
# ---------------------------------------------------------------------------


@dataclass
class RunArtifact:
    path: Path
    config: ScenarioConfig
    status: str
    reports: list = field(default_factory=list)
    trace: FlowTrace | None = None

    @property
    def all_passed(self) -> bool:
        return self.status == "completed" and all(r.passed for r in self.reports)


def _fmt(x) -> str:
    return repr(float(x))


def _write_series(trace: FlowTrace, path: Path) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(SERIES_COLUMNS) + "\n")
        for k, t in enumerate(trace.times):
            vals = [_fmt(t)]
            for name in SERIES_COLUMNS[1:]:
                col = trace.columns.get(name)
                vals.append(_fmt(col[k]) if col is not None else "nan")
            fh.write(",".join(vals) + "\n")


def _read_series(path: Path) -> tuple[np.ndarray, dict]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.array([[float(x) for x in line.strip().split(",")]
                         for line in fh if line.strip()])
    cols = {name: data[:, i] for i, name in enumerate(header)}
    times = cols.pop("t")
    return times, cols


def _snapshot_name(t: float, n: int) -> str:
    ext = "off" if n == 2 else "csv"
    return f"snapshot_t{t:.6f}.{ext}"


def _write_snapshots(trace: FlowTrace, directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for surf in trace.snapshots:
        path = directory / _snapshot_name(surf.t, surf.atlas.n)
        if surf.atlas.n == 2:
            write_off(surf, path)
        else:
            write_curve_csv(surf, path)


def _load_snapshots(directory: Path) -> list[StarSurface]:
    surfs = []
    for name in sorted(os.listdir(directory)):
        stem = name.rsplit(".", 1)[0]
        t = float(stem.replace("snapshot_t", ""))
        path = directory / name
        if name.endswith(".off"):
            surfs.append(read_off(path, t=t))
        else:
            surfs.append(read_curve_csv(path, t=t))
    surfs.sort(key=lambda s: s.t)
    return surfs


def _run_checks(config: ScenarioConfig, trace: FlowTrace,
                surface0: StarSurface, schedule: PinchSchedule | None,
                alpha: float | None) -> list[CheckReport]:
    tol = config.tolerances
    reports: list[CheckReport] = []
    t = trace.times

    emitted: set[str] = set()

    def guarded(check_id, fn, *args, **kwargs):
        emitted.add(check_id)
        try:
            rep = fn(*args, **kwargs)
        except ImcflabError as err:
            rep = CheckReport(
                name=check_id, anchor="(hypothesis or data failure)",
                margin=-np.inf, tolerance=0.0,
                status="error", details={"error": str(err)})
            rep.passed = False
        rep.details["check_id"] = check_id
        reports.append(rep)

    lam = trace.columns.get("lambda1")
    lam_p = trace.columns.get("lambda1_p")
    p_extra = next((p for p in config.p if p != 2.0), None)
    eps0 = alpha / 2.0 if alpha else None

    for name in config.check_list:
        if name == "area_growth" and config.speed == "imcf":
            guarded(name, verify_mod.check_area_growth, trace,
                    tol.get(name, 0.01))
        elif name == "monotone" and lam is not None:
            guarded(name, verify_mod.check_monotone, t, lam,
                    tol.get(name, 1e-4), name="eigenvalue_monotone_p2")
            if lam_p is not None and p_extra is not None:
                guarded(name, verify_mod.check_monotone, t, lam_p,
                        tol.get(name, 1e-4),
                        name=f"eigenvalue_monotone_p{p_extra:g}")
        elif name == "decay_bound" and lam is not None and eps0 is not None:
            guarded(name, verify_mod.check_decay_bound, t, lam, 2.0, eps0,
                    tol.get(name, 0.01), name="eigenvalue_decay_bound_p2")
            if lam_p is not None and p_extra is not None:
                guarded(name, verify_mod.check_decay_bound, t, lam_p,
                        p_extra, eps0, tol.get(name, 0.01),
                        name=f"eigenvalue_decay_bound_p{p_extra:g}")
        elif name == "rescaled_monotone" and lam is not None and eps0 is not None:
            lam_tilde = np.exp(2.0 * t / config.n) * lam
            guarded(name, verify_mod.check_rescaled_monotone, t, lam_tilde,
                    2.0, eps0, config.n, tol.get(name, 1e-4))
            if lam_p is not None and p_extra is not None:
                lam_p_tilde = np.exp(p_extra * t / config.n) * lam_p
                guarded(name, verify_mod.check_rescaled_monotone, t,
                        lam_p_tilde, p_extra, eps0, config.n,
                        tol.get(name, 1e-4))
        elif name == "rescaled_decay_schedule" and lam is not None and schedule:
            lam_tilde = np.exp(2.0 * t / config.n) * lam
            guarded(name, verify_mod.check_rescaled_decay_schedule, t,
                    lam_tilde, 2.0, schedule, tol.get(name, 0.01))
        elif name == "pinching" and schedule is not None and config.speed == "imcf":
            guarded(name, verify_mod.check_pinching_preserved, trace, schedule,
                    tol.get(name, 0.02))
        elif name == "rounding" and config.speed == "imcf":
            guarded(name, verify_mod.check_rounding, trace)
        elif name == "isoperimetric":
            for pv in config.p:
                guarded(name, verify_mod.check_isoperimetric_bound, surface0,
                        pv, alpha, tolerance=tol.get(name, 0.005))
        elif name == "evolution_identity" and config.speed == "imcf":
            guarded(name, _evolution_check, config, trace,
                    tol.get(name, 0.05))
        elif name == "h_decay":
            guarded(name, verify_mod.check_h_decay, trace)
    for name in config.check_list:
        if name not in emitted:
            rep = CheckReport(name=name, anchor="(not applicable to this run)",
                              margin=0.0, tolerance=0.0, status="skipped",
                              details={"check_id": name})
            reports.append(rep)
    return reports


def _evolution_check(config: ScenarioConfig, trace: FlowTrace,
                     tolerance: float) -> CheckReport:
    """Evolution identity on a short fine-stepped stretch from an early sample."""
    surf_a = trace.snapshots[min(1, len(trace.snapshots) - 1)]
    fd_dt = min(config.flow_config().interval / 10.0, 2e-3)
    surf = surf_a
    for _ in range(5):
        tens = compute_tensors(surf)
        surf = flow_mod.step(surf, tens, IMCF if config.speed == "imcf" else MCF,
                             fd_dt / 5.0)
    return verify_mod.evolution_residual(
        surf_a, surf, IMCF if config.speed == "imcf" else MCF,
        tolerance=tolerance)


def run_scenario(config: ScenarioConfig, out_dir=None) -> RunArtifact:
    """Execute one scenario and persist the artifact directory."""
    config.validate()
    out = Path(out_dir or config.out or "run_artifact")
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "config.json", "w") as fh:
        json.dump(asdict(config), fh, indent=2, sort_keys=True)

    surface0 = config.build_surface()
    tensors0 = compute_tensors(surface0)
    speed = IMCF if config.speed == "imcf" else MCF

    alpha = None
    schedule = None
    abort_reason = None
    if config.speed == "imcf":
        if np.any(tensors0.mean_curvature <= 0):
            abort_reason = ("hypothesis-violation: mean curvature is not "
                            "positive everywhere at t=0")
        else:
            alpha = (alpha_max(tensors0) if config.alpha == "auto"
                     else float(config.alpha))
            if alpha > 0:
                schedule = PinchSchedule(config.n, alpha)

    if abort_reason is not None:
        payload = {"status": "aborted", "abort_time": 0.0,
                   "abort_reason": abort_reason, "checks": []}
        with open(out / "report.json", "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
        artifact = RunArtifact(path=out, config=config, status="aborted")
        emit_report(out)
        return artifact

    spectral_obs = _SpectralObserver(config, alpha / 2.0 if alpha else None)
    pinch_obs = _PinchObserver(schedule)
    observers = (spectral_obs, pinch_obs)

    status = "completed"
    try:
        trace = flow_mod.run(surface0, speed, config.flow_config(), observers)
    except ImcflabError as err:
        trace = getattr(err, "partial_trace", None)
        status = "aborted"
        abort_reason = f"{type(err).__name__}: {err}"

    reports: list[CheckReport] = []
    if trace is not None:
        _write_series(trace, out / "series.csv")
        _write_snapshots(trace, out / "snapshots")
        eig_dir = out / "eigenfunctions"
        eig_dir.mkdir(parents=True, exist_ok=True)
        for t, pv, u in spectral_obs.eigenfunctions:
            write_eigenfunction_csv(u, eig_dir / f"eigfn_p{pv:g}_t{t:.6f}.csv")
        if status == "completed":
            reports = _run_checks(config, trace, surface0, schedule, alpha)

    payload = {
        "status": status,
        "checks": [r.to_dict() for r in reports],
    }
    if status == "aborted":
        payload["abort_time"] = trace.abort_time if trace is not None else 0.0
        payload["abort_reason"] = abort_reason
    with open(out / "report.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    emit_report(out)
    return RunArtifact(path=out, config=config, status=status,
                       reports=reports, trace=trace)


def verify_run(run_dir, checks=None) -> RunArtifact:
    """Re-run checks against the stored series and snapshots of a run."""
    run_dir = Path(run_dir)
    config = parse_config(run_dir / "config.json")
    if checks is not None:
        config.checks = list(checks)
    times, cols = _read_series(run_dir / "series.csv")
    snapshots = _load_snapshots(run_dir / "snapshots")
    trace = FlowTrace(n=config.n, times=times, columns=cols,
                      snapshots=snapshots)
    surface0 = snapshots[0]
    tensors0 = compute_tensors(surface0)
    alpha = None
    schedule = None
    if config.speed == "imcf" and np.all(tensors0.mean_curvature > 0):
        alpha = (alpha_max(tensors0) if config.alpha == "auto"
                 else float(config.alpha))
        if alpha > 0:
            schedule = PinchSchedule(config.n, alpha)
    reports = _run_checks(config, trace, surface0, schedule, alpha)
    payload = {"status": "completed", "checks": [r.to_dict() for r in reports]}
    with open(run_dir / "report.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    emit_report(run_dir)
    return RunArtifact(path=run_dir, config=config, status="completed",
                       reports=reports, trace=trace)


# ---------------------------------------------------------------------------
# sweeps and reporting
# ---------------------------------------------------------------------------

_SWEEP_PARAMS = ("alpha", "p", "resolution", "dt")


def _apply_sweep_value(config: ScenarioConfig, parameter: str, value):
    data = asdict(config)
    data.pop("out", None)
    if parameter == "alpha":
        data["alpha"] = float(value)
    elif parameter == "p":
        data["p"] = [2.0, float(value)] if float(value) != 2.0 else [2.0]
    elif parameter == "resolution":
        data["resolution"] = int(value)
    elif parameter == "dt":
        data["dt"] = float(value)
        data["cfl_factor"] = None
    cfg = ScenarioConfig(**data)
    cfg.validate()
    return cfg


def _sweep_one(args):
    config, out_dir = args
    return run_scenario(config, out_dir)


def sweep(base_config: ScenarioConfig, parameter: str, values,
          out_dir) -> list[RunArtifact]:
    """One scenario per value, in independent subdirectories, plus a
    combined margins table (combined.csv)."""
    if parameter not in _SWEEP_PARAMS:
        raise ValueError(f"sweep parameter must be one of {_SWEEP_PARAMS}")
    values = list(values)
    if not values:
        raise ValueError("sweep needs a nonempty list of values")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = []
    for v in values:
        cfg = _apply_sweep_value(base_config, parameter, v)
        jobs.append((cfg, out / f"{parameter}_{v:g}"))

    workers = int(os.environ.get("IMCFLAB_WORKERS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            artifacts = list(pool.map(_sweep_one, jobs))
    else:
        artifacts = [_sweep_one(job) for job in jobs]

    with open(out / "combined.csv", "w") as fh:
        fh.write("parameter,value,check,margin,tolerance,status,C\n")
        for v, art in zip(values, artifacts):
            for rep in art.reports:
                c = rep.details.get("C", "")
                fh.write(f"{parameter},{v:g},{rep.name},{_fmt(rep.margin)},"
                         f"{_fmt(rep.tolerance)},{rep.status},{c}\n")
            if not art.reports:
                fh.write(f"{parameter},{v:g},(none),nan,nan,{art.status},\n")
    return artifacts


def emit_report(run_dir) -> Path:
    """Write summary.md from report.json; returns the summary path."""
    run_dir = Path(run_dir)
    report_path = run_dir / "report.json"
    if not report_path.exists():
        raise FileNotFoundError(f"no report.json under {run_dir}")
    with open(report_path) as fh:
        payload = json.load(fh)
    lines = ["# Run summary", ""]
    if payload.get("status") == "aborted":
        lines += [
            f"**Status: aborted** at t = {payload.get('abort_time')}: "
            f"{payload.get('abort_reason')}",
            "",
        ]
    else:
        lines += [f"Status: {payload.get('status')}", ""]
    checks = payload.get("checks", [])
    if checks:
        lines += [
            "| check | claim | margin | tolerance | status |",
            "|---|---|---:|---:|---|",
        ]
        for c in checks:
            lines.append(
                f"| {c['name']} | {c['paper_anchor']} | {c['margin']:.3e} | "
                f"{c['tolerance']:.1e} | {c['status']} |")
    else:
        lines.append("(no checks were run)")
    lines.append("")
    summary = run_dir / "summary.md"
    with open(summary, "w") as fh:
        fh.write("\n".join(lines))
    return summary

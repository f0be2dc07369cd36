"""Noise sweeps: reconstruct a sample of states under each frame and average the metrics."""

from __future__ import annotations

import configparser
import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .estimator import FitOptions, reconstruct
from .frames import Frame, get_frame, load_frame
from .metrics import concurrence, fidelity_pure, purity
from .noise import RngStream, noisy_measurements
from .states import (
    GRID_PRESETS,
    PHASE_PRESETS,
    GridCounts,
    PureState4,
    grid_sample,
    parse_angle,
    phase_sample,
)

CSV_HEADER = ["frame", "sigma", "f_av", "gamma_av", "c_av", "n_states", "n_converged", "master_seed"]
DEFAULT_SIGMAS = ("0", "pi/36", "pi/18", "pi/9", "pi/6", "pi/4", "pi/3")
DEFAULT_SEED = 20210301


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SampleSpec:
    """Either a Cartesian angle grid or ``n`` evenly spaced phase-entangled states."""

    kind: str = "grid"
    counts: GridCounts | None = GRID_PRESETS["desk"]
    n: int = 0

    def __post_init__(self):
        if self.kind == "grid":
            if self.counts is None:
                raise ConfigError("grid sample needs counts")
        elif self.kind == "phase":
            if self.n < 1:
                raise ConfigError("phase sample size must be >= 1")
        else:
            raise ConfigError(f"unknown sample kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "SampleSpec":
        """``grid:desk``, ``grid:3,7,3,2,2,2``, ``phase:50`` or ``phase:large``."""
        kind, _, arg = text.strip().partition(":")
        kind, arg = kind.strip().lower(), arg.strip().lower()
        if kind == "grid":
            if arg in GRID_PRESETS:
                return cls("grid", GRID_PRESETS[arg])
            try:
                counts = [int(x) for x in arg.split(",")]
            except ValueError:
                raise ConfigError(f"bad grid counts {arg!r}") from None
            if len(counts) != 6:
                raise ConfigError("grid counts need 6 integers (theta,beta,delta,phi12,phi13,phi14)")
            try:
                return cls("grid", GridCounts(*counts))
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if kind == "phase":
            if arg in PHASE_PRESETS:
                return cls("phase", None, PHASE_PRESETS[arg])
            try:
                return cls("phase", None, int(arg))
            except ValueError:
                raise ConfigError(f"bad phase sample size {arg!r}") from None
        raise ConfigError(f"unknown sample {text!r}")

    def __str__(self):
        if self.kind == "grid":
            return "grid:" + ",".join(str(v) for v in asdict(self.counts).values())
        return f"phase:{self.n}"

    def states(self) -> list[PureState4]:
        if self.kind == "grid":
            return grid_sample(self.counts)
        return phase_sample(self.n)


@dataclass(frozen=True)
class ExperimentConfig:
    frames: tuple[str, ...] = ("mub20", "vinzant11")
    sigma_grid: tuple[float, ...] = tuple(parse_angle(s) for s in DEFAULT_SIGMAS)
    sample: SampleSpec = field(default_factory=SampleSpec)
    fit: FitOptions = field(default_factory=FitOptions)
    master_seed: int = DEFAULT_SEED
    output: str = "results/sweep.csv"
    workers: int = 1
    plots: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.frames:
            raise ConfigError("no frames given")
        sig = tuple(float(s) for s in self.sigma_grid)
        if not sig:
            raise ConfigError("sigma grid is empty")
        if any(not (s >= 0 and math.isfinite(s)) for s in sig):
            raise ConfigError("sigma values must be finite and >= 0")
        if list(sig) != sorted(sig):
            raise ConfigError("sigma grid must be sorted ascending")
        object.__setattr__(self, "sigma_grid", sig)
        object.__setattr__(self, "frames", tuple(self.frames))
        if not (0 <= int(self.master_seed) < 2**64):
            raise ConfigError("master seed must fit in 64 unsigned bits")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        for m in self.plots:
            if m not in PLOT_METRICS:
                raise ConfigError(f"unknown plot metric {m!r}")

    def digest(self) -> str:
        """Stable hash of everything that affects the numbers in the output."""
        payload = {
            "frames": list(self.frames),
            "sigma_grid": [repr(s) for s in self.sigma_grid],
            "sample": str(self.sample),
            "fit": {k: str(v) for k, v in asdict(self.fit).items() if k != "seed"},
            "master_seed": int(self.master_seed),
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


PLOT_METRICS = ("f_av", "gamma_av", "c_av")


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.replace("\n", ",").split(",") if v.strip()]


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    """Read an INI-style ``[sweep]`` section into an :class:`ExperimentConfig`.

    Keys: frames, sigma_grid, sample, master_seed, output, workers, plots,
    restarts, max_iters, grad_tol. Keyword ``overrides`` (already parsed,
    ``None`` meaning unset) take precedence over the file.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} not found")
    parser = configparser.ConfigParser()
    try:
        parser.read_string(path.read_text())
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if "sweep" not in parser:
        raise ConfigError(f"{path}: missing [sweep] section")
    sec = parser["sweep"]
    known = {"frames", "sigma_grid", "sample", "master_seed", "output", "workers", "plots",
             "restarts", "max_iters", "grad_tol"}
    unknown = set(sec) - known
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    try:
        kw = {}
        if "frames" in sec:
            kw["frames"] = tuple(_split(sec["frames"]))
        if "sigma_grid" in sec:
            kw["sigma_grid"] = tuple(parse_angle(s) for s in _split(sec["sigma_grid"]))
        if "sample" in sec:
            kw["sample"] = SampleSpec.parse(sec["sample"])
        if "master_seed" in sec:
            kw["master_seed"] = int(sec["master_seed"])
        if "output" in sec:
            out = Path(sec["output"])
            kw["output"] = str(out if out.is_absolute() else path.parent / out)
        if "workers" in sec:
            kw["workers"] = int(sec["workers"])
        if "plots" in sec:
            kw["plots"] = tuple(_split(sec["plots"]))
        fit = {}
        if "restarts" in sec:
            fit["restarts"] = int(sec["restarts"])
        if "max_iters" in sec:
            fit["max_iters"] = int(sec["max_iters"])
        if "grad_tol" in sec:
            fit["grad_tol"] = float(sec["grad_tol"])
        if fit:
            kw["fit"] = FitOptions(**fit)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    cfg = ExperimentConfig(**kw)
    fit_over = {k: overrides.pop(k) for k in ("restarts", "max_iters", "grad_tol") if k in overrides}
    fit_over = {k: v for k, v in fit_over.items() if v is not None}
    if fit_over:
        try:
            overrides["fit"] = replace(cfg.fit, **fit_over)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **overrides) if overrides else cfg


@dataclass(frozen=True)
class SweepRecord:
    frame: str
    sigma: float
    f_av: float
    gamma_av: float
    c_av: float
    n_states: int
    n_converged: int
    master_seed: int


def resolve_frame(spec: str) -> Frame:
    if spec.lower().startswith("custom:"):
        return load_frame(spec.split(":", 1)[1])
    return get_frame(spec)


def stream_index(sigma_index: int, state_index: int, n_states: int) -> int:
    return sigma_index * n_states + state_index


def reconstruct_one(frame: Frame, state: PureState4, sigma: float, master_seed: int,
                    index: int, fit: FitOptions):
    """Noisy measurement, reconstruction and metrics for one state; returns (F, gamma, C, converged)."""
    measured = noisy_measurements(frame.vectors, state, sigma, RngStream(master_seed, index))
    opts = replace(fit, seed=np.random.SeedSequence(master_seed, spawn_key=(index, 1)))
    res = reconstruct(frame, measured, opts)
    return (fidelity_pure(state, res.rho), purity(res.rho), concurrence(res.rho), res.converged)


def _cell(frame_spec: str, states: Sequence[PureState4], sigma_index: int, sigma: float,
          master_seed: int, fit: FitOptions):
    frame = resolve_frame(frame_spec)
    n = len(states)
    return [
        reconstruct_one(frame, s, sigma, master_seed, stream_index(sigma_index, k, n), fit)
        for k, s in enumerate(states)
    ]


def _aggregate(frame: str, sigma: float, rows, master_seed: int) -> SweepRecord:
    n = len(rows)
    f, g, c, conv = zip(*rows)
    return SweepRecord(
        frame=frame,
        sigma=sigma,
        f_av=min(1.0, math.fsum(f) / n),
        gamma_av=min(1.0, max(0.25, math.fsum(g) / n)),
        c_av=min(1.0, math.fsum(c) / n),
        n_states=n,
        n_converged=int(sum(conv)),
        master_seed=int(master_seed),
    )


def run_sweep(config: ExperimentConfig, progress=None) -> list[SweepRecord]:
    """Averaged metrics for every (frame, sigma) cell, in that order.

    Each (sigma, state) pair owns the random stream
    ``sigma_index * n_states + state_index``, so results do not depend on
    ``workers`` or on completion order.
    """
    states = config.sample.states()
    if not states:
        raise ConfigError("sample is empty")
    for spec in config.frames:
        resolve_frame(spec)
    cells = [(fr, i, s) for fr in config.frames for i, s in enumerate(config.sigma_grid)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            futures = [
                pool.submit(_cell, fr, states, i, s, config.master_seed, config.fit)
                for fr, i, s in cells
            ]
            results = [fut.result() for fut in futures]
    else:
        results = []
        for fr, i, s in cells:
            results.append(_cell(fr, states, i, s, config.master_seed, config.fit))
            if progress:
                progress(fr, s)
    return [
        _aggregate(fr, s, rows, config.master_seed) for (fr, _, s), rows in zip(cells, results)
    ]


def _fmt(x: float) -> str:
    return f"{x + 0.0:.12g}"  # + 0.0 turns -0.0 into 0.0


def format_csv(records: Sequence[SweepRecord], comments: Sequence[str] = ()) -> str:
    if not records:
        raise ValueError("no records to write")
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([r.frame, _fmt(r.sigma), _fmt(r.f_av), _fmt(r.gamma_av), _fmt(r.c_av),
                    r.n_states, r.n_converged, r.master_seed])
    return buf.getvalue()


def emit_csv(records: Sequence[SweepRecord], path: str | Path, comments: Sequence[str] = ()) -> Path:
    """Write records as CSV; ``comments`` become leading ``#`` lines."""
    path = Path(path)
    text = format_csv(records, comments)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def provenance(config: ExperimentConfig) -> list[str]:
    return [
        f"qst4 sweep master_seed={config.master_seed} config_digest={config.digest()}",
        f"sample={config.sample} frames={','.join(config.frames)} restarts={config.fit.restarts}",
    ]


def load_csv(path: str | Path) -> list[SweepRecord]:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError(f"{path}: empty CSV") from None
    if header != CSV_HEADER:
        raise ValueError(f"{path}: unexpected header {header}")
    records = []
    for lineno, row in enumerate(reader, 2):
        if len(row) != len(CSV_HEADER):
            raise ValueError(f"{path}: row {lineno} has {len(row)} fields")
        try:
            records.append(SweepRecord(row[0], float(row[1]), float(row[2]), float(row[3]),
                                       float(row[4]), int(row[5]), int(row[6]), int(row[7])))
        except ValueError:
            raise ValueError(f"{path}: row {lineno} is malformed") from None
    if not records:
        raise ValueError(f"{path}: no records")
    return records


def emit_plot(records: Sequence[SweepRecord], metric: str, path: str | Path,
              comments: Sequence[str] = ()) -> Path:
    from .plot import render_svg

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_svg(records, metric, comments))
    return path

"""Command-line interface: ``qst4 {sweep,reconstruct,frames,probe,plot}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .estimator import FitOptions, reconstruct
from .frames import Frame, injectivity_probe
from .metrics import concurrence, fidelity_pure, purity
from .noise import RngStream, noisy_measurements
from .runner import (
    PLOT_METRICS,
    ConfigError,
    SampleSpec,
    emit_csv,
    emit_plot,
    load_config,
    load_csv,
    provenance,
    resolve_frame,
    run_sweep,
)
from .states import StateAngles, parse_angle, phase_entangled, state_from_angles

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 2, 3


class UsageError(Exception):
    pass


def _angle(text: str) -> float:
    try:
        return parse_angle(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _angle_list(text: str) -> tuple[float, ...]:
    return tuple(_angle(s) for s in text.split(",") if s.strip())


def _fmt(x: float) -> str:
    return f"{x + 0.0:.12g}"  # + 0.0 turns -0.0 into 0.0


def _frame(spec: str) -> Frame:
    try:
        return resolve_frame(spec)
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc)) from None


def cmd_sweep(args) -> int:
    overrides = dict(
        frames=tuple(s.strip() for s in args.frames.split(",")) if args.frames else None,
        sigma_grid=args.sigma_grid,
        sample=SampleSpec.parse(args.sample) if args.sample else None,
        master_seed=args.seed,
        output=args.output,
        workers=args.workers,
        restarts=args.restarts,
        max_iters=args.max_iters,
        grad_tol=args.grad_tol,
    )
    config = load_config(args.config, **overrides)
    for spec in config.frames:
        _frame(spec)

    def progress(frame, sigma):
        if not args.quiet:
            print(f"done frame={frame} sigma={sigma:.6g}", file=sys.stderr)

    records = run_sweep(config, progress=progress)
    header = provenance(config)
    out = emit_csv(records, config.output, header)
    print(f"wrote {out}")
    metrics = args.plot or list(config.plots)
    if metrics and len(config.sigma_grid) < 2:
        raise UsageError("plots need at least 2 sigma values")
    for metric in metrics:
        svg = emit_plot(records, metric, out.with_name(f"{out.stem}_{metric}.svg"), header)
        print(f"wrote {svg}")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    if args.sigma < 0:
        raise UsageError("sigma must be >= 0")
    try:
        if args.phase is not None:
            state = phase_entangled(args.phase)
        else:
            state = state_from_angles(StateAngles(args.theta, args.beta, args.delta,
                                                  args.phi12, args.phi13, args.phi14))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    frame = _frame(args.frame)
    measured = noisy_measurements(frame.vectors, state, args.sigma, RngStream(args.seed, 0))
    opts = FitOptions(restarts=args.restarts, max_iters=args.max_iters, grad_tol=args.grad_tol,
                      seed=np.random.SeedSequence(args.seed, spawn_key=(0, 1)))
    res = reconstruct(frame, measured, opts)
    print(f"# frame={frame.name} sigma={_fmt(args.sigma)} seed={args.seed}")
    print("rho_out (re im per entry):")
    for row in res.rho.mat:
        print("  " + "  ".join(f"{_fmt(z.real)} {_fmt(z.imag)}" for z in row))
    print(f"residual {_fmt(res.residual)}")
    print(f"converged {str(res.converged).lower()} iterations {res.iterations}")
    print(f"fidelity {_fmt(fidelity_pure(state, res.rho))}")
    print(f"purity {_fmt(purity(res.rho))}")
    print(f"concurrence {_fmt(concurrence(res.rho))}")
    return EXIT_OK


def cmd_frames(args) -> int:
    frame = _frame(args.frame)
    for vec in frame.vectors:
        print(" ".join(f"{_fmt(z.real)} {_fmt(z.imag)}" for z in vec))
    return EXIT_OK


def cmd_probe(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    report = injectivity_probe(_frame(args.frame), args.n, args.seed)
    print(report.summary())
    for i, d_int, d_state in report.flagged[:10]:
        print(f"flag pair={i} intensity_distance={d_int:.3e} state_distance={d_state:.3e}")
    return EXIT_OK


def cmd_plot(args) -> int:
    path = Path(args.csv)
    try:
        records = load_csv(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.output) if args.output else path.with_name(f"{path.stem}_{args.metric}.svg")
    try:
        emit_plot(records, args.metric, out)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"wrote {out}")
    return EXIT_OK


def _add_fit_flags(p, defaults=True):
    d = FitOptions()
    p.add_argument("--restarts", type=int, default=d.restarts if defaults else None)
    p.add_argument("--max-iters", type=int, default=d.max_iters if defaults else None)
    p.add_argument("--grad-tol", type=float, default=d.grad_tol if defaults else None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qst4",
        description="Four-level state tomography with noisy intensity measurements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a sigma sweep from a config file")
    p.add_argument("config", help="INI file with a [sweep] section")
    p.add_argument("--frames", help="comma list, e.g. mub20,vinzant11 or custom:path")
    p.add_argument("--sigma-grid", type=_angle_list, help='e.g. "0,pi/36,pi/18,pi/9"')
    p.add_argument("--sample", help="grid:desk | grid:3,7,3,2,2,2 | phase:50")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--output", help="CSV output path")
    p.add_argument("--workers", type=int)
    p.add_argument("--plot", action="append", choices=PLOT_METRICS,
                   help="also write an SVG for this metric (repeatable)")
    p.add_argument("--quiet", action="store_true")
    _add_fit_flags(p, defaults=False)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reconstruct", help="reconstruct a single state")
    p.add_argument("--frame", default="mub20")
    p.add_argument("--sigma", type=_angle, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--phase", type=_angle, help="use the entangled state (|00> + e^{i phase}|11>)/sqrt2")
    for name in ("theta", "beta", "delta", "phi12", "phi13", "phi14"):
        p.add_argument(f"--{name}", type=_angle, default=0.0)
    _add_fit_flags(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("frames", help="print the vectors of a frame")
    p.add_argument("frame")
    p.set_defaults(func=cmd_frames)

    p = sub.add_parser("probe", help="empirical injectivity check of a frame")
    p.add_argument("frame")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("plot", help="render an SVG from a sweep CSV")
    p.add_argument("csv")
    p.add_argument("--metric", choices=PLOT_METRICS, default="f_av")
    p.add_argument("--output")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

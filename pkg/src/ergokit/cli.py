"""Command-line driver: ``ergokit <subcommand> --config <path> [...]``.

Exit codes: 0 success, 1 validation/domain error, 2 invariant violation.
"""

from __future__ import annotations

import argparse
import sys

from .checks import run_invariant_checks
from .errors import DomainError, InvariantViolation, ValidationError
from .experiments import (
    ExperimentConfig,
    ExperimentKind,
    classify_crossing_pattern,
    load_config,
    run_beta_sweep,
    run_energy_entropy_diagram,
    run_entropy_gain_scatter,
)

_RUNNERS = {
    "diagram": (ExperimentKind.ENERGY_ENTROPY_DIAGRAM, run_energy_entropy_diagram),
    "sweep": (ExperimentKind.BETA_SWEEP, run_beta_sweep),
    "scatter": (ExperimentKind.ENTROPY_GAIN_SCATTER, run_entropy_gain_scatter),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergokit",
        description="Energy-gain bound experiments for finite-dimensional quantum systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("diagram", "energy-entropy diagram: initial state, sample clouds, Gibbs boundary"),
        ("sweep", "bound curves and sampled energy gains versus inverse temperature"),
        ("scatter", "joint (energy gain, entropy gain) clouds at one inverse temperature"),
        ("classify", "classify the free-energy-bound vs nonunital-lower-bound crossing pattern"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the experiment JSON config")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--samples", type=int, default=None, help="override the config sample count")
        p.add_argument("--out", default=None, help="override the config output path")
    check = sub.add_parser("check", help="run the seeded invariant self-check battery")
    check.add_argument("--seed", type=int, default=42, help="seed for the battery (default 42)")
    return parser


def _apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    if args.seed is not None:
        if not (0 <= args.seed < 2**64):
            raise ValidationError(f"--seed must be a 64-bit unsigned integer, got {args.seed}")
        cfg.seed = args.seed
    if args.samples is not None:
        if args.samples < 1:
            raise ValidationError(f"--samples must be >= 1, got {args.samples}")
        cfg.samples = args.samples
    if args.out is not None:
        cfg.output_path = args.out
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            return 0 if run_invariant_checks(args.seed) else 2
        cfg = _apply_overrides(load_config(args.config), args)
        if args.command == "classify":
            if cfg.kind is not ExperimentKind.CROSSING_CLASSIFY:
                raise ValidationError(f"config.kind: expected crossing_classify, got {cfg.kind.value}")
            report = classify_crossing_pattern(cfg)
            line = report.to_json()
            print(line)
            if cfg.output_path:
                with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as f:
                    f.write(line + "\n")
            return 0
        expected_kind, runner = _RUNNERS[args.command]
        if cfg.kind is not expected_kind:
            raise ValidationError(f"config.kind: expected {expected_kind.value}, got {cfg.kind.value}")
        if not cfg.output_path:
            raise ValidationError("config.output_path: required (or pass --out)")
        path = runner(cfg)
        print(f"wrote {path}")
        return 0
    except (ValidationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""
Entry point of the openqosc command-line tool.

Subcommands: propagate, stability, sweep, validate and list-presets.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

# Allow running as a plain script
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli.runner import ExitCode, run_propagate, run_stability, run_sweep, run_validate
from src.config.config import RunConfig, SweepConfig, list_presets, load_config
from src.utils.errors import ConfigurationError, OpenQoscError
from src.utils.logger import set_log_level, setup_logger

logger = setup_logger(__name__)

COMMANDS = ("propagate", "stability", "sweep", "validate", "list-presets")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser shared by all subcommands."""
    parser = argparse.ArgumentParser(
        prog="openqosc",
        description="Exact non-Markovian dynamics of damped harmonic oscillators",
        epilog="Any configuration key can also be given as --dotted.key value",
    )
    parser.add_argument("command", choices=COMMANDS, help="Workflow to run")
    parser.add_argument("--config", type=str, help="Configuration file (key = value or YAML)")
    parser.add_argument("--preset", type=str, help="Shipped preset used as the base configuration")
    parser.add_argument("--out", type=str, help="Output directory")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override one configuration key (repeatable)",
    )
    parser.add_argument("--parallelism", type=int, help="Worker processes for sweeps")
    parser.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    return parser


def split_key_flags(extra: Sequence[str]) -> Tuple[List[str], List[str]]:
    """
    Turn leftover `--dotted.key value` / `--dotted.key=value` flags into overrides.

    Returns:
        (overrides, unrecognized arguments)
    """
    overrides: List[str] = []
    unknown: List[str] = []
    i = 0
    while i < len(extra):
        token = extra[i]
        key = token[2:] if token.startswith("--") else ""
        if "." in key.split("=", 1)[0]:
            if "=" in key:
                overrides.append(key)
            elif i + 1 < len(extra):
                overrides.append(f"{key}={extra[i + 1]}")
                i += 1
            else:
                unknown.append(token)
        else:
            unknown.append(token)
        i += 1
    return overrides, unknown


def parse_arguments(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    key_overrides, unknown = split_key_flags(extra)
    if unknown:
        parser.error(f"unrecognized arguments: {' '.join(unknown)}")
    args.overrides = list(args.overrides) + key_overrides
    return args


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """
    Assemble the configuration and apply --out, --parallelism and --quiet last.

    Raises:
        ConfigurationError: If the configuration is invalid
    """
    cfg = load_config(config_path=args.config, preset=args.preset, overrides=args.overrides)
    if args.out:
        cfg.output.path = args.out
    if args.parallelism is not None:
        cfg.sweep.parallelism = args.parallelism
    if args.quiet:
        cfg.log_level = "WARNING"
    errors = cfg.validate()
    if errors:
        raise ConfigurationError(errors)
    return cfg


def dispatch(command: str, cfg: RunConfig) -> int:
    if command == "propagate":
        return run_propagate(cfg)
    if command == "stability":
        return run_stability(cfg)
    if command == "sweep":
        return run_sweep(SweepConfig.from_run(cfg))
    return run_validate(cfg)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main execution function."""
    args = parse_arguments(argv)
    if args.quiet:
        set_log_level("WARNING")

    if args.command == "list-presets":
        for name in list_presets():
            print(name)
        return ExitCode.OK

    try:
        cfg = load_run_config(args)
        set_log_level(cfg.log_level)

        logger.info("=" * 80)
        logger.info(f"openqosc {args.command}")
        logger.info("=" * 80)
        logger.info(
            f"Family: {cfg.spectral.family.value}, modes: {cfg.grid.n_modes}, "
            f"mode: {cfg.propagation.mode.value}, output: {cfg.output.path}"
        )

        code = dispatch(args.command, cfg)

        logger.info("")
        logger.info("=" * 80)
        logger.info(f"openqosc {args.command} finished with exit code {int(code)}")
        logger.info("=" * 80)
        return int(code)

    except KeyboardInterrupt:
        logger.info("\n\nInterrupted by user")
        return ExitCode.INTERRUPTED

    except ConfigurationError as e:
        logger.error(str(e))
        print(f"\n❌ {e}")
        return ExitCode.CONFIGURATION

    except OSError as e:
        logger.error(f"I/O error: {e}")
        print(f"\n❌ I/O error: {e}")
        return ExitCode.IO

    except OpenQoscError as e:
        logger.exception("Simulation failed")
        print(f"\n❌ Error: {e}")
        return ExitCode.UNEXPECTED

    except Exception as e:
        logger.exception("Unexpected error")
        print(f"\n❌ Error: {e}")
        return ExitCode.UNEXPECTED


def run() -> None:
    """Console-script wrapper."""
    sys.exit(main())


if __name__ == "__main__":
    run()

"""
Command line entry point: ``hybrid_inverse_render <subcommand> [flags]``.

Every subcommand shares the flags --config/--preset, --out, --seed, --workers
and -v. Flags override the configuration file, which overrides the model
defaults. Each successful run leaves ``run.json`` in the output directory.
"""

import argparse
import sys
from pathlib import Path
from typing import Any, Dict, NoReturn, Optional, Sequence

import torch

from hybrid_inverse_render.error import handle_error
from hybrid_inverse_render.pipeline import (
    CommandContext,
    CommandFactory,
    CommandRegistry,
    RunRecord,
    create_display,
    load_run_config,
    write_run_record,
)
from hybrid_inverse_render.utils import (
    LOGNAME_ROOT,
    ConfigurationException,
    Diagnostics,
    ErrorSeverity,
    RuntimeEnv,
    get_logger,
    get_output_dir,
    resolve_config_path,
    set_console_level,
)
from hybrid_inverse_render.version import __version__

PROG = "hybrid_inverse_render"

logger = get_logger(LOGNAME_ROOT)


class CliParser(argparse.ArgumentParser):
    """Argument parser reporting bad arguments as configuration errors."""

    def error(self, message: str) -> NoReturn:
        raise ConfigurationException(
            message=f"Invalid arguments for {self.prog}: {message}",
            user_message=f"{message} (see {self.prog} --help)",
            severity=ErrorSeverity.ERROR,
        )


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags shared by every subcommand."""
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--config", default=None, help="Run configuration .json file")
    source.add_argument(
        "--preset", default=None, help="Preset name in the config directory, e.g. small"
    )
    parser.add_argument(
        "--out", default=None, help="Output directory, <output root>/<command> if omitted"
    )
    parser.add_argument(
        "--seed", type=int, default=None, help="Seed for every random process of the run"
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=None,
        help="Worker threads, HIR_WORKERS or all cores if omitted",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="Console log detail")


def build_parser(factory: CommandFactory) -> argparse.ArgumentParser:
    """Top-level parser with one subparser per registered subcommand."""
    parser = CliParser(
        prog=PROG,
        description="Hybrid SDF + eyeball face reconstruction from flash-lit captures.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in factory.list_available_commands():
        command_class = factory.command_class(name)
        subparser = subparsers.add_parser(
            name,
            help=command_class.help,
            description=command_class.help,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )
        add_common_arguments(subparser)
        command_class.add_arguments(subparser)
    return parser


def _config_path(args: argparse.Namespace) -> Optional[Path]:
    choice = args.config or args.preset
    return resolve_config_path(choice) if choice else None


def run(argv: Sequence[str]) -> int:
    """Parse ``argv``, run the subcommand and return the exit code.

    Returns:
        int: 0 on success, 1 for user or configuration errors, 2 for internal errors.
    """
    try:
        RuntimeEnv.setup_env()
        factory = CommandFactory(CommandRegistry())
        args = build_parser(factory).parse_args(list(argv))
        set_console_level(args.verbose)

        command_class = factory.command_class(args.command)
        overrides: Dict[str, Any] = dict(command_class.config_overrides(args))
        if args.seed is not None:
            overrides["train.seed"] = args.seed
            overrides["synthetic.seed"] = args.seed
        config = load_run_config(_config_path(args), overrides)

        seed = args.seed if args.seed is not None else config.train.seed
        workers = args.workers if args.workers is not None else RuntimeEnv.default_workers()
        if workers < 1:
            raise ConfigurationException(
                message=f"--workers must be positive, got {workers}",
                user_message="--workers must be at least 1.",
                severity=ErrorSeverity.ERROR,
            )
        out_dir = Path(args.out) if args.out else get_output_dir() / args.command

        Diagnostics.reset()
        torch.manual_seed(seed)
        torch.set_num_threads(workers)
        torch.use_deterministic_algorithms(True)

        context = CommandContext(args, config, out_dir, create_display(), seed, workers)
        record = RunRecord(
            command=args.command,
            argv=list(argv),
            config=config.model_dump(mode="json"),
            seed=seed,
            workers=workers,
        )
        logger.info(
            "Running %s into %s (seed %d, %d workers)", args.command, out_dir, seed, workers
        )
        record.results = factory.create_command(args.command, context).execute()
        write_run_record(record.finish(), out_dir)
        return 0
    except SystemExit as e:
        # --help and --version
        return e.code if isinstance(e.code, int) else 0
    except Exception as e:  # pylint: disable=broad-except
        return handle_error(e)


def main() -> None:
    """Console script entry point."""
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""
``gradcheck``: compare autograd gradients of the objective with central differences.
"""

import argparse
from typing import Any, Dict

from hybrid_inverse_render.pipeline.commands.base import CommandBase
from hybrid_inverse_render.pipeline.commands.registry import register_command
from hybrid_inverse_render.training import run_gradcheck
from hybrid_inverse_render.training.gradcheck import DEFAULT_STEP, DEFAULT_TOLERANCE
from hybrid_inverse_render.utils import ErrorSeverity, InvariantException


@register_command("gradcheck")
class GradcheckCommand(CommandBase):
    """Exits 0 only when every checked coordinate is within tolerance."""

    help = "Check analytic gradients against finite differences"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--coords", type=int, default=4, help="Coordinates per group")
        parser.add_argument("--step", type=float, default=DEFAULT_STEP, help="Difference step")
        parser.add_argument(
            "--tolerance", type=float, default=DEFAULT_TOLERANCE, help="Max relative error"
        )

    def execute(self) -> Dict[str, Any]:
        args = self.context.args
        report = run_gradcheck(
            seed=self.context.seed,
            coords_per_group=args.coords,
            step=args.step,
            tolerance=args.tolerance,
        )
        worst = report.by_group()
        self.display.show_table(
            "Gradient check", ["group", "max relative error"], sorted(worst.items())
        )
        self.display.show_text(f"max relative error {report.max_relative_error:.3e}")
        if not report.passed:
            raise InvariantException(
                message=(
                    f"gradient check failed: max relative error {report.max_relative_error:.3e} "
                    f">= {report.tolerance:g}"
                ),
                user_message="Analytic gradients disagree with finite differences.",
                severity=ErrorSeverity.ERROR,
            )
        return {
            "max_relative_error": report.max_relative_error,
            "coordinates": len(report.samples),
            "groups": worst,
        }

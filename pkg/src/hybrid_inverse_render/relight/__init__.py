"""
Subpackage for relighting: SH basis renders of the fitted scan, the SH weight
solve and ratio-image relighting of aligned frames.
"""

from hybrid_inverse_render.relight.config import DEFAULT_RATIO_FLOOR, RelightConfig
from hybrid_inverse_render.relight.ratio import RelitSequence, ratio_relight, relight_sequence
from hybrid_inverse_render.relight.sh_basis import (
    ShBasisRenders,
    ShSolution,
    as_sh_weights,
    load_sh_weights,
    render_sh_basis,
    save_sh_weights,
    solve_sh_weights,
)

__all__ = [
    "DEFAULT_RATIO_FLOOR",
    "RelightConfig",
    "RelitSequence",
    "ratio_relight",
    "relight_sequence",
    "ShBasisRenders",
    "ShSolution",
    "as_sh_weights",
    "load_sh_weights",
    "render_sh_basis",
    "save_sh_weights",
    "solve_sh_weights",
]

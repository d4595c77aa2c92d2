"""
Process-wide diagnostics counters.

Numerical safety nets (clamped grid queries, degenerate normals, near-singular
flash distances, skipped optimizer groups) never raise; they count. Counters are
reset at the start of each command and echoed into run.json.
"""

from collections import Counter
from typing import ClassVar, Dict

OUT_OF_BOUNDS = "out_of_bounds_queries"
DEGENERATE_NORMALS = "degenerate_normals"
FLASH_NEAR_SINGULAR = "flash_near_singular"
SKIPPED_OPTIMIZER_GROUPS = "skipped_optimizer_groups"


class Diagnostics:
    """Class-level counter store shared by every module."""

    _counts: ClassVar[Counter[str]] = Counter()

    @classmethod
    def increment(cls, name: str, amount: int = 1) -> None:
        """Add ``amount`` to counter ``name`` (no-op for zero)."""
        if amount:
            cls._counts[name] += int(amount)

    @classmethod
    def get(cls, name: str) -> int:
        """Current value of counter ``name``."""
        return cls._counts[name]

    @classmethod
    def snapshot(cls) -> Dict[str, int]:
        """Copy of all non-zero counters."""
        return dict(cls._counts)

    @classmethod
    def reset(cls) -> None:
        """Clear every counter."""
        cls._counts.clear()

"""
Run records: ``run.json`` written into every output directory.
"""

import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List

from hybrid_inverse_render.utils import (
    LOGNAME_PIPELINE,
    Diagnostics,
    ErrorSeverity,
    SystemException,
    get_logger,
)
from hybrid_inverse_render.version import __version__

RUN_RECORD_FILENAME = "run.json"

logger = get_logger(LOGNAME_PIPELINE)


def utc_timestamp() -> str:
    """Current UTC time in ISO 8601 form."""
    return datetime.now(timezone.utc).isoformat()


@dataclass
class RunRecord:
    """What was run, with which settings, and what the numerical safety nets counted."""

    command: str
    argv: List[str]
    config: Dict[str, Any]
    seed: int
    workers: int
    version: str = __version__
    started: str = field(default_factory=utc_timestamp)
    finished: str = ""
    diagnostics: Dict[str, int] = field(default_factory=dict)
    results: Dict[str, Any] = field(default_factory=dict)

    def finish(self) -> "RunRecord":
        """Stamp the end time and copy the diagnostics counters."""
        self.finished = utc_timestamp()
        self.diagnostics = Diagnostics.snapshot()
        return self


def write_run_record(record: RunRecord, out_dir: Path) -> Path:
    """Write ``run.json`` into ``out_dir``."""
    path = out_dir / RUN_RECORD_FILENAME
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(asdict(record), indent=2, default=str), encoding="utf-8")
    except OSError as e:
        raise SystemException(
            message=f"Failed to write run record {path}: {e}",
            user_message=f"Unable to write {path}. Please check the output directory.",
            severity=ErrorSeverity.ERROR,
            original_error=e,
        ) from e
    logger.info("Wrote run record %s", path)
    return path

"""Run logs for sweeps and verification runs."""

import json
from datetime import datetime
from pathlib import Path
from typing import Optional
from uuid import uuid4

from .config import get_settings


def _ensure_dir(path: Path) -> None:
    """Ensure directory exists."""
    path.mkdir(parents=True, exist_ok=True)


def log_run(category: str, name: str, data: dict, log_dir: Optional[str] = None) -> Optional[str]:
    """
    Write a run record as JSON and return its path.

    Records land in <log_dir>/<category>/<name>/<timestamp>_<id>.json.

    Args:
        category: Top-level grouping (e.g. 'sweeps', 'verify')
        name: Subject of the run (e.g. a state family)
        data: JSON-serializable payload
        log_dir: Override for settings.log_dir

    Returns:
        Path to the log file, or None when run logs are disabled
    """
    settings = get_settings()
    if not settings.run_logs:
        return None

    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_id = str(uuid4())[:8]

    run_dir = Path(log_dir or settings.log_dir) / category / name
    _ensure_dir(run_dir)

    log_path = run_dir / f"{timestamp}_{log_id}.json"

    log_entry = {
        "id": f"{timestamp}_{log_id}",
        "timestamp": datetime.now().isoformat(),
        **data
    }

    with open(log_path, "w") as f:
        json.dump(log_entry, f, indent=2, default=str)

    return str(log_path)

# -*- coding: utf-8 -*-
"""
events.py - Shared output helpers for the forge commands.

Every command can run in two modes: human-readable console output, or
one JSON object per line (``--json``) for scripts and CI. Library modules
never print; they return reports and manifests, and the commands turn
those into events through the helpers below.

Event types: log, progress, warning, result, error, summary.
"""

from __future__ import annotations

import json
import sys
from typing import Any


def emit(json_mode: bool, msg: dict) -> None:
    """Send a JSON message to stdout.

    When json_mode is False, this is a no-op so callers don't need
    to guard every call.

    Args:
        json_mode: Whether to output JSON (True) or do nothing (False).
        msg: Dictionary to serialize as a JSON line.
    """
    if json_mode:
        print(json.dumps(msg, ensure_ascii=False, default=jsonable), flush=True)


def say(json_mode: bool, text: str, **fields: Any) -> None:
    """Print a log line, or emit it as a ``log`` event in JSON mode."""
    if json_mode:
        emit(True, {"type": "log", "text": text, **fields})
    else:
        print(text, flush=True)


def warn(json_mode: bool, text: str, **fields: Any) -> None:
    """Report a warning: ``warning`` event, or ``Warning: ...`` on stderr."""
    if json_mode:
        emit(True, {"type": "warning", "text": text, **fields})
    else:
        print(f"Warning: {text}", file=sys.stderr, flush=True)


def fail(json_mode: bool, text: str, **fields: Any) -> None:
    """Report an error: ``error`` event, or ``Error: ...`` on stderr."""
    if json_mode:
        emit(True, {"type": "error", "text": text, **fields})
    else:
        print(f"Error: {text}", file=sys.stderr, flush=True)


def notes_to_warnings(json_mode: bool, notes: list[str], **fields: Any) -> None:
    """Surface the ``notes`` list of a manifest or report as warnings."""
    for note in notes:
        warn(json_mode, note, **fields)


def jsonable(obj: Any) -> Any:
    """json.dumps default= hook for numpy values and sets."""
    # numpy scalars and arrays show up in reports
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")

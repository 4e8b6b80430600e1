from __future__ import annotations

import sys

from .constants import PACKAGE_NAME
from .settings import get_setting


def _emit(level: str, message: str) -> None:
    print(f"[{PACKAGE_NAME}][{level}] {message}", file=sys.stderr)


def is_debug_mode() -> bool:
    return bool(get_setting("debug", False))


def log_debug(message: str) -> None:
    if is_debug_mode():
        _emit("DEBUG", message)


def log_info(message: str) -> None:
    _emit("INFO", message)


def log_warning(message: str) -> None:
    _emit("WARNING", message)


def log_error(message: str) -> None:
    _emit("ERROR", message)


from __future__ import annotations

import json
import sys
from functools import wraps
from typing import Any, cast

from .constants import EXIT_INVARIANT_BREACH, EXIT_VALIDATION_ERROR
from .errors import GrwsError, InvariantBreach
from .log import log_error
from .types import ErrorPayload, T_Callable


def _emit_error(error: GrwsError) -> None:
    payload: ErrorPayload = {"type": type(error).__name__, "message": str(error)}
    sys.stdout.write(json.dumps({"error": payload}, sort_keys=True, indent=2) + "\n")


def exit_code_on_error(func: T_Callable) -> T_Callable:
    """
    Turns package errors raised by a command into an exit code and a JSON error object on stdout.

    Invariant breaches exit with 2; every other package error is a validation failure and exits with 1.
    """

    @wraps(func)
    def wrapped(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except InvariantBreach as e:
            log_error(str(e))
            _emit_error(e)
            return EXIT_INVARIANT_BREACH
        except GrwsError as e:
            _emit_error(e)
            return EXIT_VALIDATION_ERROR

    return cast(T_Callable, wrapped)

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from typing import Any

import jinja2

from .constants import PACKAGE_NAME


@lru_cache
def load_string_template(template: str, *, keep_trailing_newline: bool = False) -> jinja2.Template:
    return _JINJA_TEMPLATE_ENV.overlay(keep_trailing_newline=keep_trailing_newline).from_string(template)


@lru_cache
def load_resource_template(template_path: str, *, keep_trailing_newline: bool = False) -> jinja2.Template:
    content = resources.files(PACKAGE_NAME).joinpath("templates", template_path).read_text(encoding="utf-8")
    return load_string_template(content, keep_trailing_newline=keep_trailing_newline)


def render_note(template: str, **context: Any) -> str:
    return load_string_template(template).render(**context)


def verdict_line(payload: dict[str, Any]) -> str:
    """One-line rendering of a verdict payload, e.g. `violated at n=4, k=0 (value 1/3)`."""
    if "order" in payload:
        return f"order {payload['order']}"
    text = str(payload.get("status", "?"))
    if witness := payload.get("witness"):
        text += f" at n={witness['n']}, k={witness['k']}"
        if "value" in witness:
            text += f" (value {witness['value']})"
        elif "interval" in witness:
            text += f" (within {witness['interval']})"
    return text


_JINJA_TEMPLATE_ENV = jinja2.Environment(
    trim_blocks=True,
    lstrip_blocks=True,
    undefined=jinja2.StrictUndefined,
)
_JINJA_TEMPLATE_ENV.filters.update(
    verdict_line=verdict_line,
)
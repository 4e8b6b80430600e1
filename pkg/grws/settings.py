from __future__ import annotations

import json
import os
from functools import lru_cache
from importlib import resources
from typing import Any

import jmespath

from .constants import PACKAGE_NAME, SETTINGS_ENV_VAR, SETTINGS_FILE_NAME

_user_settings_path: str | None = None
_overrides: dict[str, Any] = {}


@lru_cache
def _compile_jmespath_expression(expression: str) -> jmespath.parser.ParsedResult:
    return jmespath.compile(expression)


def _deep_merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def use_settings_file(path: str | None, overrides: dict[str, Any] | None = None) -> None:
    """Overlays the settings in `path`, then `overrides`, on top of the bundled defaults (`None` drops them)."""
    global _user_settings_path, _overrides
    _user_settings_path = path
    _overrides = dict(overrides or {})
    get_settings.cache_clear()


@lru_cache
def get_settings() -> dict[str, Any]:
    content = resources.files(PACKAGE_NAME).joinpath(SETTINGS_FILE_NAME).read_text(encoding="utf-8")
    settings: dict[str, Any] = json.loads(content)
    if user_path := (_user_settings_path or os.environ.get(SETTINGS_ENV_VAR)):
        with open(user_path, encoding="utf-8") as f:
            settings = _deep_merge(settings, json.load(f))
    return _deep_merge(settings, _overrides)


def get_setting(key: str, default: Any = None) -> Any:
    return get_settings().get(key, default)


def get_setting_dotted(dotted: str, default: Any = None) -> Any:
    value = _compile_jmespath_expression(dotted).search(get_settings())
    return default if value is None else value


def settings_overlay() -> tuple[str | None, dict[str, Any]]:
    """The arguments of the last `use_settings_file` call, for re-applying them in worker processes."""
    return _user_settings_path, dict(_overrides)

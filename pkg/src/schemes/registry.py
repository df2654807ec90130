"""Registry of placement schemes.

Schemes register themselves when their module is imported. Lookups import
every module under `placement_schemes` (except those starting with an
underscore) first, so the registry is complete however it was reached.
"""

from __future__ import annotations

from importlib import import_module
from pkgutil import walk_packages
from typing import Dict, Sequence, Type

from src.models.enums import SchemeName
from src.schemes.base_scheme import BaseScheme


SCHEME_PACKAGE = "src.schemes.placement_schemes"

_schemes: Dict[SchemeName, Type[BaseScheme]] = {}
_discovered = False


def discover_schemes() -> Sequence[str]:
    """Import every placement scheme module once; returns the registered names."""
    global _discovered
    if not _discovered:
        package = import_module(SCHEME_PACKAGE)
        for module_info in walk_packages(package.__path__, prefix=f"{package.__name__}."):
            if module_info.name.rpartition(".")[-1].startswith("_"):
                continue
            import_module(module_info.name)
        _discovered = True
    return tuple(name.value for name in SchemeName if name in _schemes)


def register_scheme(scheme_cls: Type[BaseScheme]) -> Type[BaseScheme]:
    """Class decorator that adds *scheme_cls* under its `scheme` name."""
    existing = _schemes.get(scheme_cls.scheme)
    if existing is not None and existing is not scheme_cls:
        raise ValueError(f"Scheme '{scheme_cls.scheme.value}' is already registered by {existing.__name__}")
    _schemes[scheme_cls.scheme] = scheme_cls
    return scheme_cls


def get_schemes() -> Sequence[Type[BaseScheme]]:
    """Registered scheme classes in `SchemeName` order."""
    discover_schemes()
    return tuple(_schemes[name] for name in SchemeName if name in _schemes)


def get_scheme(name) -> Type[BaseScheme]:
    discover_schemes()
    try:
        return _schemes[SchemeName(name)]
    except (KeyError, ValueError) as exc:
        raise KeyError(f"Unknown scheme '{name}'") from exc


def get_scheme_names() -> Sequence[str]:
    return tuple(scheme.scheme.value for scheme in get_schemes())

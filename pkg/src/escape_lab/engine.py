"""Backend selection for the event engine.

Two interchangeable implementations exist: a compiled extension
(``escape_lab._engine``, built from Cython at install time) and a pure
Python fallback (``escape_lab._engine_py``).  They run the identical
algorithm with the identical random draws, so results do not depend on
which one is loaded — only speed does.

Selection order: an explicit ``kind`` argument, else the
``ESCAPE_LAB_ENGINE`` environment variable, else ``auto`` (compiled if
available, otherwise Python).
"""

from __future__ import annotations

import os

from .errors import ConfigError

_CHOICES = ("auto", "compiled", "python")


def get_engine(kind: str | None = None):
    """Return ``(engine_class, backend_name)`` for the requested backend.

    ``kind`` may be ``auto``, ``compiled``, ``python``, or None (falls back
    to the ``ESCAPE_LAB_ENGINE`` environment variable, then ``auto``).
    """
    choice = (kind or os.environ.get("ESCAPE_LAB_ENGINE") or "auto").strip().lower()
    if choice not in _CHOICES:
        raise ConfigError(
            f"unknown engine backend {choice!r}; expected one of {', '.join(_CHOICES)}"
        )
    if choice in ("auto", "compiled"):
        try:
            from . import _engine

            return _engine.EventEngine, "compiled"
        except ImportError:
            if choice == "compiled":
                raise ConfigError(
                    "the compiled engine was requested but is not available "
                    "(extension not built); use auto or python"
                ) from None
    from . import _engine_py

    return _engine_py.EventEngine, "python"


def default_backend() -> str:
    """Name of the backend ``get_engine(None)`` would pick right now."""
    return get_engine(None)[1]

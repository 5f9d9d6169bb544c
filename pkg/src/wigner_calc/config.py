"""Process-wide numerical settings.

Settings live in a :class:`contextvars.ContextVar`, so a temporary override
made with :func:`using` is visible only to the current thread / task.
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, replace


class TruncationError(ValueError):
    """An operation would produce a chaos degree or word length beyond the budget."""


class PreconditionError(ValueError):
    """Inputs violate the documented precondition of an operation."""


@dataclass(frozen=True)
class Settings:
    max_degree: int = 8
    prune: float = 1e-14
    # dense tensordot is used when every tensor involved has at most this many cells
    dense_limit: int = 1 << 22


_current: contextvars.ContextVar[Settings] = contextvars.ContextVar(
    "wigner_calc_settings", default=Settings()
)


def settings() -> Settings:
    return _current.get()


@contextlib.contextmanager
def using(**overrides):
    """Temporarily override fields of the active :class:`Settings`.

    >>> with using(max_degree=12):
    ...     settings().max_degree
    12
    """
    token = _current.set(replace(_current.get(), **overrides))
    try:
        yield _current.get()
    finally:
        _current.reset(token)

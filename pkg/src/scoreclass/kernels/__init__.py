"""Backend selection for the subset-DP oracle kernels.

The compiled extension is preferred when present; otherwise the numpy
reference backend is used.  Set ``SCORECLASS_BACKEND=reference`` (or
``native``) to force a backend; forcing ``native`` fails loudly when the
extension was not built.
"""

from __future__ import annotations

import os

_forced = os.environ.get("SCORECLASS_BACKEND", "").strip().lower()
if _forced not in ("", "native", "reference"):
    raise ImportError(f"unknown SCORECLASS_BACKEND value: {_forced!r}")

_impl = None
if _forced != "reference":
    try:
        from . import _native as _impl
    except ImportError:
        if _forced == "native":
            raise
if _impl is None:
    from . import _reference as _impl

BACKEND: str = _impl.NAME
opt_evaluation_cost = _impl.opt_evaluation_cost
opt_verification_cost = _impl.opt_verification_cost


def get_backend(name: str):
    """Return one backend module by name (used by tests and benchmarks)."""
    if name == "reference":
        from . import _reference

        return _reference
    if name == "native":
        from . import _native

        return _native
    raise ValueError(f"unknown backend: {name!r}")


def available_backends() -> tuple[str, ...]:
    names = []
    try:
        from . import _native  # noqa: F401

        names.append("native")
    except ImportError:
        pass
    names.append("reference")
    return tuple(names)

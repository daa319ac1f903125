"""Backend selection for the row-echelon kernel.

Prefers the compiled extension when it has been built; falls back to the
pure-Python implementation.  Set SEMIFLEX_FORCE_PY=1 to force the fallback
(used by the tests and the benchmark to compare both).
"""

import os

if os.environ.get("SEMIFLEX_FORCE_PY"):
    from . import elim_py as _impl

    BACKEND = "python"
else:
    try:
        from . import elim_c as _impl  # type: ignore[attr-defined]

        BACKEND = "c"
    except ImportError:
        from . import elim_py as _impl

        BACKEND = "python"

row_echelon_int = _impl.row_echelon_int


def available_backends():
    """Names of the kernels importable in this environment."""
    names = ["python"]
    try:
        from . import elim_c  # noqa: F401

        names.insert(0, "c")
    except ImportError:
        pass
    return names

"""Backend selection for the hot kernels.

Set ``HURWITZ_PIA_DISABLE_NUMBA=1`` to force the pure-numpy path even when
numba is importable.  The flag is read once, at import time.
"""

from __future__ import annotations

import os

_DISABLE = os.environ.get("HURWITZ_PIA_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except Exception:  # pragma: no cover
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):  # type: ignore[no-redef]
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def _wrap(fn):
            return fn

        return _wrap


USE_NUMBA = NUMBA_AVAILABLE and not _DISABLE


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"

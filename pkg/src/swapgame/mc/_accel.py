"""Backend selection: numba when available unless SWAPGAME_DISABLE_NUMBA is set."""
import os

_FLAG = os.environ.get("SWAPGAME_DISABLE_NUMBA", "").strip().lower()
DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if DISABLED:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn


def backend_name() -> str:
    return "numba" if HAVE_NUMBA else "numpy"

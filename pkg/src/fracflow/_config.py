"""Process-wide worker count used by FFTs and chunked samplers."""

import os

_threads = None


def get_threads():
    if _threads is not None:
        return _threads
    env = os.environ.get("FRACFLOW_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def set_threads(n):
    """Cap internal parallelism. Results never depend on this value."""
    global _threads
    _threads = None if n is None else max(1, int(n))

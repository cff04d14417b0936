"""Kernel backend selection and worker-thread control.

Every hot loop lives twice: once jitted with numba (`_kernels_numba`) and
once as pure vectorized numpy (`_kernels_numpy`).  Both implement the same
function surface and the same chunked compensated reductions, so results
agree bitwise on the integer paths and to float tolerance on the
transcendental paths.  The active backend is picked from the
ERGOLAB_BACKEND environment variable ("numba" or "numpy"); when unset,
numba is used if it imports, numpy otherwise.

Worker threads only apply to the numba backend.  Reductions are chunked
with an ordered combine, so any thread count yields bit-identical results.
"""

from __future__ import annotations

import os

# Must be set before numba is first imported: allows oversubscribing small
# boxes so reproducibility can be checked at 8 workers on 2 cores.
os.environ.setdefault("NUMBA_NUM_THREADS", "16")
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

ENV_BACKEND = "ERGOLAB_BACKEND"
ENV_THREADS = "ERGOLAB_THREADS"

_cached_name = None
_numpy_threads = 1


class BackendError(RuntimeError):
    pass


def _resolve_name() -> str:
    name = os.environ.get(ENV_BACKEND, "").strip().lower()
    if name in ("numba", "numpy"):
        return name
    if name:
        raise BackendError(
            f"unknown {ENV_BACKEND}={name!r}; expected 'numba' or 'numpy'"
        )
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


def active_backend() -> str:
    """Name of the backend in use for this process."""
    global _cached_name
    if _cached_name is None:
        _cached_name = _resolve_name()
    return _cached_name


_numba_thread_default_done = False


def get_kernels(name: str | None = None):
    """Return the kernel module for `name` (default: the active backend)."""
    global _numba_thread_default_done
    name = name or active_backend()
    if name == "numba":
        from ergolab import _kernels_numba

        if not _numba_thread_default_done:
            # NUMBA_NUM_THREADS is the oversubscription cap; the working
            # default is the machine's core count
            import numba

            numba.set_num_threads(
                max(1, min(os.cpu_count() or 1, int(numba.config.NUMBA_NUM_THREADS)))
            )
            _numba_thread_default_done = True
        return _kernels_numba
    if name == "numpy":
        from ergolab import _kernels_numpy

        return _kernels_numpy
    raise BackendError(f"unknown backend {name!r}")


def set_threads(k: int) -> int:
    """Request `k` worker threads; returns the effective count.

    numpy backend: stored for reporting only (numpy kernels are single
    threaded).  numba backend: clamped to NUMBA_NUM_THREADS.
    """
    global _numpy_threads, _numba_thread_default_done
    if k < 1:
        raise ValueError("thread count must be >= 1")
    if active_backend() == "numba":
        import numba

        eff = min(int(k), int(numba.config.NUMBA_NUM_THREADS))
        numba.set_num_threads(eff)
        _numba_thread_default_done = True
        return eff
    _numpy_threads = int(k)
    return _numpy_threads


def get_threads() -> int:
    if active_backend() == "numba":
        import numba

        return int(numba.get_num_threads())
    return _numpy_threads


def threads_from_env() -> int | None:
    raw = os.environ.get(ENV_THREADS, "").strip()
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise BackendError(f"bad {ENV_THREADS}={raw!r}") from exc

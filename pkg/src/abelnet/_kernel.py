"""Select the compiled kernels when available, else the pure-Python ones.

Set ``ABELNET_PURE=1`` to force the pure-Python implementation.
"""

import os

BACKEND = "python"

if os.environ.get("ABELNET_PURE", "") not in ("1", "true", "yes"):
    try:
        from ._ckernels import greedy_run, run_word  # noqa: F401

        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from ._pykernels import greedy_run, run_word  # noqa: F401

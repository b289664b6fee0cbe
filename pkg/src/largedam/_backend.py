"""Pick the compiled kernels when importable, otherwise the pure-Python ones.

Set ``LARGEDAM_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("LARGEDAM_PURE_PYTHON"):
    from . import _fallback as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels

        BACKEND = "compiled"
    except ImportError:
        from . import _fallback as kernels

        BACKEND = "python"

takacs_forward = kernels.takacs_forward
simulate_kernel = kernels.simulate_kernel

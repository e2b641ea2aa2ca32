"""Select the stepping kernels at import time.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``ZENOMATCH_BACKEND=python`` is set, the numpy
implementation is loaded.
"""

import os

from . import _kernels_py

python_kernels = _kernels_py

try:
    from . import _kernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

if compiled_kernels is not None and os.environ.get("ZENOMATCH_BACKEND", "").lower() != "python":
    kernels = compiled_kernels
    BACKEND = "cython"
else:
    kernels = python_kernels
    BACKEND = "python"

"""Kernel dispatch: compiled Cython core when built, numpy fallback otherwise.

Set ``QCORR_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
weighted_conditional_entropy = _kernels_py.weighted_conditional_entropy

if os.environ.get("QCORR_PURE_PYTHON") != "1":
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        weighted_conditional_entropy = _kernels.weighted_conditional_entropy

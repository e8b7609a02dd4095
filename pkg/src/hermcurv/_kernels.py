"""Select the truncated-Taylor product kernel at import time.

The compiled extension is used when it was built; setting the environment
variable ``HERMCURV_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _taylor_py

python_mul = _taylor_py.truncated_mul
python_mul_many = _taylor_py.truncated_mul_many

try:
    from . import _taylor_ext
except ImportError:  # extension not built
    _taylor_ext = None

compiled_mul = _taylor_ext.truncated_mul if _taylor_ext is not None else None
compiled_mul_many = _taylor_ext.truncated_mul_many if _taylor_ext is not None else None

if _taylor_ext is not None and os.environ.get("HERMCURV_PURE_PYTHON", "") not in ("1", "true"):
    BACKEND = "compiled"
    truncated_mul = compiled_mul
    truncated_mul_many = compiled_mul_many
else:
    BACKEND = "python"
    truncated_mul = python_mul
    truncated_mul_many = python_mul_many

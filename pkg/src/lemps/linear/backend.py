"""Selects the coordinate-descent kernel at import time.

Prefers the compiled Cython extension and falls back to the pure-numpy
implementation when the extension is absent (source checkout without a
build) or when LEMPS_PURE_PYTHON is set in the environment. Both kernels
share one signature; ``benchmarks/bench_cd.py`` compares their speed.
"""

import os

from . import _cd_python

python_kernel = _cd_python.enet_coordinate_descent
compiled_kernel = None

try:
    from . import _cd_kernel

    compiled_kernel = _cd_kernel.enet_coordinate_descent
except ImportError:
    _cd_kernel = None

if compiled_kernel is not None and not os.environ.get("LEMPS_PURE_PYTHON"):
    enet_coordinate_descent = compiled_kernel
    USING_COMPILED = True
else:
    enet_coordinate_descent = python_kernel
    USING_COMPILED = False

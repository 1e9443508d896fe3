"""Builds the optional compiled coordinate-descent kernel.

The package works without it (a pure-numpy fallback is selected at import),
but the compiled kernel is what makes 10^3-repeat harness runs fast.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

_EXTENSIONS = [
    ("lemps.linear._cd_kernel", "src/lemps/linear/_cd_kernel.pyx"),
    ("lemps._smo_kernel", "src/lemps/_smo_kernel.pyx"),
]

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                name,
                sources=[source],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
            for name, source in _EXTENSIONS
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)

"""Build script for the optional compiled kernels.

The package works without the extension (a pure numpy/Python fallback is
selected at import time); building it makes the Gauss-Seidel-Newton sweep
and CSR matvec run at C speed.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - source dists ship pre-generated C
    cythonize = None

extensions = [
    Extension(
        "pwlsolve._kernels._native",
        ["src/pwlsolve/_kernels/_native.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
    if cythonize
    else [],
)

"""Build script: compiles the optional fast kernels when Cython is available.

The package is fully functional without the extension; `greenhouse_rl._kernels`
falls back to the NumPy implementation at import time.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    # -fno-math-errno lets gcc vectorize the tanh sweep via libmvec without
    # changing IEEE results; -O3 vectorizes the stride-1 accumulation loops.
    ext_modules = cythonize(
        [
            Extension(
                "greenhouse_rl._kernels._fast",
                ["src/greenhouse_rl/_kernels/_fast.pyx"],
                extra_compile_args=["-O3", "-fno-math-errno"],
            )
        ],
        language_level=3,
    )
except ImportError:
    print(
        "greenhouse-rl: Cython not found, installing with NumPy kernels only",
        file=sys.stderr,
    )

setup(ext_modules=ext_modules)

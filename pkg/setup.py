"""Build script for the optional compiled simulation core.

The Cython extension is marked optional: if no C compiler (or Cython) is
available the install still succeeds and the package falls back to the pure
Python kernels at import time.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "triggercds._kernels._ckernels",
                ["src/triggercds/_kernels/_ckernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)

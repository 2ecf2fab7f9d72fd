"""Build script for the optional compiled simulation kernels.

The package is pure Python except for ``ethena_ctl._kernels``, a Cython
translation of the Euler-Maruyama stepping loops.  If Cython or a C
compiler is unavailable the build skips the extension and the package
falls back to the numpy kernels at import time.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/ethena_ctl/_kernels.pyx"],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)

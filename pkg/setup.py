"""Build script: compiles the optional Cython kernel, falling back to pure Python.

The package is fully functional without the extension; `dorex._kernel`
selects whichever backend imports.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("dorex._kernel.speedups", ["src/dorex/_kernel/speedups.pyx"])],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)

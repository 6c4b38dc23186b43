"""Build script: compiles the optional Monte Carlo kernel extension.

The package works without the extension (a pure-Python fallback is selected
at import time); set RUINTIME_PURE=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

PYX = "src/ruintime/_walk_kernel.pyx"

ext_modules = []
if not os.environ.get("RUINTIME_PURE") and os.path.exists(PYX):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("ruintime._walk_kernel", [PYX])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)

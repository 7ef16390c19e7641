"""Build script for the optional compiled kernel backend.

The package works without the extension: scoreclass.kernels falls back to
the pure-Python backend when the compiled module is missing.  Set
SCORECLASS_NO_NATIVE=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SCORECLASS_NO_NATIVE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "scoreclass.kernels._native",
                    ["src/scoreclass/kernels/_native.pyx"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)

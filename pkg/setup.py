"""Build script: compiles the optional Cython max-flow kernel.

The package works without the extension (a pure-Python kernel is selected
at import time), so a failed build is tolerated.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "hyperspars._core._maxflow",
                ["src/hyperspars/_core/_maxflow.pyx"],
            )
        ],
        language_level="3",
    )
    for ext in ext_modules:
        ext.optional = True
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)

"""Build script for the optional compiled kernels.

The package works without a C compiler: when the extension is missing,
``a2glos.kernels`` falls back to the pure-Python implementation.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("A2GLOS_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "a2glos._kernels",
                    ["src/a2glos/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)

"""Build script for the optional compiled scoring kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import time); building it just makes query scoring faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "kccbot.retrieval._simkernel",
                ["src/kccbot/retrieval/_simkernel.pyx"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
        },
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)

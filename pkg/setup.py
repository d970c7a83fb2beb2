"""Build script for the optional compiled merge-loop extension.

The package works without the extension (a pure-Python merge loop is
selected at import time); building it just makes large clusterings faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("bandclust._core", ["src/bandclust/_core.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)

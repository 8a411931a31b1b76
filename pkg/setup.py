"""Build script: compiles the interval kernel extension when possible.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile downgrades to a pure-Python install
instead of breaking it.
"""
import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("lorkam._core", ["src/lorkam/_core.pyx"],
                   include_dirs=[numpy.get_include()],
                   define_macros=[("NPY_NO_DEPRECATED_API",
                                   "NPY_1_7_API_VERSION")],
                   extra_compile_args=["-O3"])],
        language_level=3)
except ImportError:
    extensions = []

setup(ext_modules=extensions)

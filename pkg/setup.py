"""Build script for the optional compiled equalizer kernel.

The package works without the extension (a pure-Python twin is selected at
import time), so a failed Cython build degrades gracefully to a slower install.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("v2i_rrm._kernels", ["src/v2i_rrm/_kernels.pyx"])],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)

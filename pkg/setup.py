"""Build the optional compiled quadrature kernels.

    python setup.py build_ext --inplace

The package works without the extension (NumPy fallback); building it
speeds up the bilinear quadrature sweeps roughly an order of magnitude.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "parabolab._kernels_cy",
                ["src/parabolab/_kernels_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)

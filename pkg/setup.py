from setuptools import Extension, setup

import numpy

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "eoqsim._kernels",
                ["src/eoqsim/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython: install runs with the pure-numpy kernel backend.
    ext_modules = []

setup(ext_modules=ext_modules)

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # No Cython available: install runs pure Python, the package falls back
    # to the numpy kernels at import time.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "noncoh._kernels",
                ["src/noncoh/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)

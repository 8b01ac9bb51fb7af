"""Build script for the optional Cython Monte Carlo kernel.

The package is fully functional without the extension: cvqbench.montecarlo
falls back to a numpy implementation at import time. Building from a source
tree without Cython (or without a C compiler) therefore degrades gracefully
to a pure-Python install.
"""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "cvqbench._mc_cython",
                ["src/cvqbench/_mc_cython.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)

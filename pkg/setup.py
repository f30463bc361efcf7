"""Build script for the optional compiled kernel core.

The package is fully functional without the extension: sdec._kernels
falls back to the NumPy implementation when the compiled module is
missing (see src/sdec/_kernels/__init__.py). Set SDEC_SKIP_EXT=1 to
force a pure-Python build.
"""

import os

from setuptools import setup


def extensions():
    if os.environ.get("SDEC_SKIP_EXT"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "sdec._kernels._core",
        ["src/sdec/_kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions())

"""Build script: compiles the optional Cython core for the hot prox loop.

The package works without the extension (a NumPy fallback is selected at
import); the build therefore never fails on a missing compiler or Cython.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "bsppa._burg_fast",
                ["src/bsppa/_burg_fast.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError as exc:  # pragma: no cover - build environment dependent
    print(f"bsppa: building without compiled core ({exc})")

setup(ext_modules=ext_modules)

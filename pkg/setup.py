"""Build hook for the optional compiled elimination kernel.

The package is pure Python; if Cython and a C compiler are available the
fraction-free row-echelon kernel is compiled as semiflex._kernels.elim_c
and picked up automatically at import.  Build it in place with

    python3 setup.py build_ext --inplace

A missing compiler or Cython is not an error: the pure-Python twin is used.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "semiflex._kernels.elim_c",
                ["src/semiflex/_kernels/elim_c.pyx"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)

"""Build script.

The compiled kernel module is optional: if Cython (or a C compiler) is not
available the package installs anyway and falls back to the numpy
implementations in degenex._kernels.pyback. Set DEGENEX_SKIP_CYTHON=1 to
force a pure-Python install.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("DEGENEX_SKIP_CYTHON") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "degenex._kernels._fastcore",
                    ["src/degenex/_kernels/_fastcore.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except Exception as exc:  # noqa: BLE001 - any build-chain problem means "no extension"
        print("degenex: building without the compiled kernels (%s)" % exc)
        ext_modules = []

setup(ext_modules=ext_modules)

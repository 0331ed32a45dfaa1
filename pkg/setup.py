import os

from setuptools import setup

ext_modules = []
if os.environ.get("SURVEXT_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "survext._ckernels",
                    ["src/survext/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # no Cython: the NumPy fallback in survext._pykernels is used
        ext_modules = []

setup(ext_modules=ext_modules)

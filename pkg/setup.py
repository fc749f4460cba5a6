"""Build script for the optional compiled kernel extension.

The package works without the extension: ``hetnet_ee.kernels`` falls back
to the pure-numpy implementation when the compiled module is missing.
"""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "hetnet_ee.kernels._core",
        sources=["src/hetnet_ee/kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(
        extensions, compiler_directives={"language_level": "3"}
    )
)

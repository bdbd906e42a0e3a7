import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; chainlab._pykernels is used
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("CHAINLAB_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "chainlab._ckernels",
                ["src/chainlab/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                language="c++",
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )

setup(ext_modules=ext_modules)

import platform

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# hardware popcount is baseline on every x86-64 CPU still in service (x86-64-v2)
flags = ["-O3"] + (["-mpopcnt"] if platform.machine() in ("x86_64", "AMD64") else [])

extensions = [
    Extension(
        "spiked_qaoa._kernels",
        ["src/spiked_qaoa/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=flags,
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))

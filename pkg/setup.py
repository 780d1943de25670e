from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off: the double-double kernels rely on exact IEEE mul/add
# rounding; FMA contraction would change results vs the numpy fallback.
setup(
    ext_modules=cythonize(
        [
            Extension(
                "rcl._kernels",
                ["src/rcl/_kernels.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
)

import os
import platform
import sys

from setuptools import Extension, setup

# ZETALAB_NO_EXT=1 installs the pure-Python package only.
# ZETALAB_NATIVE=1 tunes the CUE kernel for the build machine (-march=native).


def _cue_flags():
    args, link = ["-O3"], []
    if sys.platform.startswith("linux") and platform.machine() in ("x86_64", "AMD64"):
        # glibc's libmvec supplies SIMD exp/log/sin once fast-math is on
        args += ["-ffast-math"]
        link += ["-lmvec"]
        if os.environ.get("ZETALAB_NATIVE"):
            args += ["-march=native"]
    return args, link


ext_modules = []
if not os.environ.get("ZETALAB_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        cue_args, cue_link = _cue_flags()
        ext_modules = cythonize(
            [
                Extension(
                    "zetalab._kernels",
                    ["src/zetalab/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                ),
                Extension(
                    "zetalab._cue_kernel",
                    ["src/zetalab/_cue_kernel.pyx"],
                    extra_compile_args=cue_args,
                    extra_link_args=cue_link,
                ),
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)

"""Builds the optional compiled core.

The package works without the extension (a pure-Python backend is selected
at import time), so a failed compile only costs speed.  FP contraction is
disabled so the compiled kernels stay bit-identical to the Python ones.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            "warning: building meshforge._core failed (%s); "
            "the pure-Python backend will be used" % (exc,),
            file=sys.stderr,
        )


ext_modules = [
    Extension(
        "meshforge._core",
        sources=["src/meshforge/_core.pyx"],
        language="c++",
        extra_compile_args=["-O3", "-ffp-contract=off", "-std=c++14"],
    )
]

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(ext_modules, language_level="3")
except ImportError:
    ext_modules = []

setup(
    ext_modules=ext_modules,
    cmdclass={"build_ext": optional_build_ext},
)

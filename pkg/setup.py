"""Build script: compiles the Cython kernel when a toolchain is available.

The extension is an accelerator, not a requirement -- if compilation fails
the package installs anyway and `epci.backend` falls back to the pure-Python
kernel at import time.
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler or headers
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._skip(exc)

    @staticmethod
    def _skip(exc):
        warnings.warn(
            f"epci: compiled kernel build failed ({exc!r}); "
            "installing with the pure-Python kernel only"
        )


def extensions():
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        warnings.warn("epci: Cython unavailable; building without the compiled kernel")
        return []
    return cythonize(
        [Extension("epci._ckernel", ["src/epci/_ckernel.pyx"])],
        language_level="3",
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})

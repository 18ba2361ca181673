"""Build script: compiles the optional game-loop kernel.

The compiled extension is a pure speedup; if the build fails (no compiler,
no Cython), installation proceeds and the package falls back to the
pure-Python stepper at import time.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def extensions():
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "silogame._kernel",
        ["src/silogame/_kernel.pyx"],
        # no -ffast-math / -march: the kernel must match the pure-Python
        # stepper bit for bit (IEEE ordering, no FMA contraction)
        extra_compile_args=["-O2"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: kernel build skipped ({exc}); "
                  "using pure-Python stepper", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: kernel build skipped ({exc}); "
                  "using pure-Python stepper", file=sys.stderr)


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})

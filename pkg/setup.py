"""Build script for the optional compiled event-engine core.

The simulation engine has two interchangeable implementations: a Cython
extension (fast path) and a pure-Python module with identical semantics.
If the extension cannot be built (no compiler, no Cython), installation
falls back to the pure-Python engine; `escape_lab.engine` selects the
backend at import time.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, otherwise warn and continue."""

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
        import sys

        print(
            f"warning: compiled engine not built ({exc}); "
            "falling back to the pure-Python engine",
            file=sys.stderr,
        )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "escape_lab._engine",
        sources=["src/escape_lab/_engine.pyx"],
        language="c++",
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": optional_build_ext},
)

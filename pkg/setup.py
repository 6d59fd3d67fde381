"""Build script for the optional compiled series core.

The package is pure Python plus one small Cython extension holding the
zonal-series inner loops.  If Cython or a C compiler is unavailable the
build falls back to the NumPy implementation selected at import time, so
a failed extension build is a warning, not an error.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, otherwise continue without it."""

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
        import warnings

        warnings.warn(
            "compiled series core not built (%s); the NumPy fallback "
            "will be used" % (exc,),
            stacklevel=1,
        )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "bergman_lab.kernels._series_cy",
        ["src/bergman_lab/kernels/_series_cy.pyx"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})

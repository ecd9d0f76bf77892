import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the compiled simplex kernel if possible; the package falls back
    to the pure-Python kernel when it is missing."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler
            self.warn(f"skipping compiled kernel: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self.warn(f"skipping {ext.name}: {exc}")


def extensions():
    if os.environ.get("ARBCERT_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension("arbcert.lp._kernel", ["src/arbcert/lp/_kernel.pyx"], extra_compile_args=["-O3"])
    try:
        return cythonize([ext], compiler_directives={"language_level": 3}, quiet=True)
    except Exception as exc:
        print(f"skipping compiled kernel: {exc}")
        return []


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})

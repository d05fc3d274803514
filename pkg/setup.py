"""Build hook for the optional Cython kernels.

The extension is optional: if Cython or a C compiler is unavailable the
package installs without it and ``lipmod.kernels`` falls back to the
pure-Python implementation.
"""
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: skipping compiled kernels ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: failed to build {ext.name} ({exc})")


try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "lipmod._ckernels",
                ["src/lipmod/_ckernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})

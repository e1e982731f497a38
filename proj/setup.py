"""CMake-driving build for the _hamlink extension.

The wheel contains the pure-python `hamlink` package plus the pybind11
extension `hamlink._hamlink`, built by the project's CMakeLists with tests
and the CLI switched off. Use `pip install . --no-build-isolation`.
"""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str, sourcedir: str = "") -> None:
        super().__init__(name, sources=[])
        self.sourcedir = os.fspath(Path(sourcedir).resolve())


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        ext_fullpath = Path.cwd() / self.get_ext_fullpath(ext.name)
        extdir = ext_fullpath.parent.resolve()

        cfg = "Debug" if int(os.environ.get("DEBUG", 0)) else "Release"
        cmake_args = [
            f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={extdir}{os.sep}",
            f"-DPYTHON_EXECUTABLE={sys.executable}",
            f"-DPython3_EXECUTABLE={sys.executable}",
            f"-DCMAKE_BUILD_TYPE={cfg}",
            "-DHAMLINK_BUILD_CLI=OFF",
            "-DHAMLINK_BUILD_TESTING=OFF",
            "-DHAMLINK_BUILD_PYTHON=ON",
            f"-DHAMLINK_VERSION_INFO={self.distribution.get_version()}",
        ]
        if "CMAKE_ARGS" in os.environ:
            cmake_args += [item for item in os.environ["CMAKE_ARGS"].split(" ") if item]

        build_temp = Path(self.build_temp) / ext.name
        build_temp.mkdir(parents=True, exist_ok=True)

        subprocess.run(["cmake", ext.sourcedir, *cmake_args], cwd=build_temp, check=True)
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_hamlink", "-j"], cwd=build_temp, check=True
        )


setup(
    packages=["hamlink"],
    package_dir={"": "python"},
    ext_modules=[CMakeExtension("hamlink._hamlink")],
    cmdclass={"build_ext": CMakeBuild},
    zip_safe=False,
)

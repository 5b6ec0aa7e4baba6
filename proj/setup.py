import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

# The extension compiles the core sources directly instead of linking the
# static library so a plain `pip install -e . --no-build-isolation` works
# without a prior CMake build.
ext = Pybind11Extension(
    "ntd._ntd",
    sorted(glob.glob("src/*.cpp")) + ["bindings/module.cpp"],
    include_dirs=["include", "vendor"],
    cxx_std=20,
)

setup(
    packages=["ntd"],
    package_dir={"ntd": "python/ntd"},
    ext_modules=[ext],
    cmdclass={"build_ext": build_ext},
)

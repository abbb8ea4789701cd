import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

sources = sorted(glob.glob("src/*.cpp")) + ["bindings/module.cpp"]

ext = Pybind11Extension(
    "rankstab._core",
    sources,
    include_dirs=["include", "vendor"],
    cxx_std=20,
)
ext.extra_compile_args.append("-pthread")
ext.extra_link_args.append("-pthread")

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})

from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "pap1324._ckernel",
        ["src/pap1324/_ckernel.pyx"],
        include_dirs=["src/pap1324"],
        language="c++",
        extra_compile_args=["-O3", "-std=c++17"],
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))

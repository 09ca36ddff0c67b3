import os

from setuptools import setup

ext_modules = []
if not os.environ.get("GRADEDGEO_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            ["src/gradedgeo/_ckernels.pyx"],
            compiler_directives={"language_level": "3"},
            quiet=True,
        )

setup(ext_modules=ext_modules)

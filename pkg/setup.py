import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ABELNET_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("abelnet._ckernels", ["src/abelnet/_ckernels.pyx"])],
            compiler_directives={"language_level": 3, "boundscheck": False, "wraparound": False},
        )

setup(ext_modules=ext_modules)

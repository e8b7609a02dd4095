"""Build hook for the optional compiled Taylor kernel.

Package metadata lives in pyproject.toml.  If Cython or a compiler is not
available the package installs without the extension and falls back to the
numpy kernel at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("hermcurv._taylor_ext", ["src/hermcurv/_taylor_ext.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)

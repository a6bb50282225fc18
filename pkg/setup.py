"""Build script for the optional compiled scan kernel.

The package is pure Python except for one Cython extension that speeds up
the automaton scan loop. If Cython or a C compiler is unavailable the
extension is skipped and the package falls back to the pure-Python kernel
at import time.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/fdcloud/annotate/_scan_cy.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)

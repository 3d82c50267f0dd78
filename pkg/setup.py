"""Build script: compiles the optional grid-search extension.

The package works without the extension (a pure-Python kernel is selected
at import time), so any build failure here downgrades to a warning.
"""

import sys

from setuptools import Extension, setup

kwargs = {}
try:
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "minecollab._pathfind_cy",
        sources=["src/minecollab/_pathfind_cy.pyx"],
        include_dirs=[numpy.get_include()],
    )
    kwargs["ext_modules"] = cythonize([ext], language_level=3)
except Exception as exc:  # pragma: no cover - build-env dependent
    print(f"warning: skipping compiled pathfinding kernel ({exc})", file=sys.stderr)

setup(**kwargs)

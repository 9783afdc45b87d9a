"""Builds the optional compiled matching kernels.

Without Cython (or a C compiler) the package installs as pure Python and
``treegram.matching`` falls back to ``_match_py``.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "treegram._match_c",
                ["src/treegram/_match_c.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)

"""Build the optional Cython Aberth kernel.

The package works without it; ``zerolimits.rootfind`` falls back to a
pure-Python kernel when the extension is missing.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "zerolimits._aberth_ext",
                ["src/zerolimits/_aberth_ext.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "realizekit._speed",
                ["src/realizekit/_speed.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython: the pure-Python backend is selected at import time.
    pass

setup(ext_modules=ext_modules)

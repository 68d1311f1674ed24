from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "pachner._canon_fast",
                ["src/pachner/_canon_fast.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # The compiled kernel is optional; the package falls back to the pure
    # Python implementation in pachner._canon_py.
    extensions = []

for ext in extensions:
    ext.optional = True

setup(ext_modules=extensions)

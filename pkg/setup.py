from setuptools import setup

# The compiled kernel is optional: the package falls back to the numpy
# implementation in nterm._kernels._pykernels when the extension is absent.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/nterm/_kernels/_ckernels.pyx",
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)

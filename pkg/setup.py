import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("MKPTAU_PURE_PYTHON") != "1":
    import gmpy2
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("mkptau.algebra._ckernels", ["src/mkptau/algebra/_ckernels.pyx"],
                   include_dirs=[os.path.dirname(gmpy2.__file__)], libraries=["gmp"])],
        language_level="3",
    )

setup(ext_modules=ext_modules, zip_safe=False)

from setuptools import Extension, setup
from Cython.Build import cythonize

ext = Extension("steerkit._jacobi", ["src/steerkit/_jacobi.pyx"])

setup(ext_modules=cythonize([ext], language_level=3))

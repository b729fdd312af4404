from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "freeconv.kernels._fast",
                ["src/freeconv/kernels/_fast.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

# the name/packages/package_dir are also in pyproject.toml; repeating them
# here keeps legacy setuptools code paths (old pip/venv combinations) from
# misplacing the extension under the src layout
setup(
    name="freeconv",
    ext_modules=ext_modules,
    package_dir={"": "src"},
    packages=["freeconv", "freeconv.kernels"],
    entry_points={"console_scripts": ["freeconv = freeconv.cli:main"]},
)

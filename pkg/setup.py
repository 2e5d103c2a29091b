"""Setup for gtaon."""

import setuptools


with open("README.md", "r") as fh:
    long_description = fh.read()


setuptools.setup(
    name='gtaon',
    version='0.1.0',
    description='Group testing designs, decoders and the all-or-nothing '
                'phase transition',
    license='MIT License',
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=[
        'gtaon',
        'gtaon.harness'],
    package_dir={"gtaon": "gtaon"},
    zip_safe=False,
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.8',
    install_requires=[
        "numpy",
        "scipy",
        "pandas",
        "pyparsing>=3.1",
        "sympy",
        "tomli; python_version < '3.11'"
    ],
    extras_require={
        "test": ["pytest"],
        "docs": ["sphinx", "numpydoc"]
    },
    entry_points={
        "console_scripts": ["gtaon = gtaon.harness.cli:main"]
    }
)

#!/usr/bin/env python
# -*- coding: utf-8 -*-

import os
import re

from setuptools import setup


def get_version(package):
    """
    Return package version as listed in `__version__` in `init.py`.
    """
    with open(os.path.join(package, "__init__.py")) as f:
        return re.search("__version__ = ['\"]([^'\"]+)['\"]", f.read()).group(1)


def get_long_description():
    """
    Return the README.
    """
    with open("README.md", encoding="utf8") as f:
        return f.read()


def get_packages(package):
    """
    Return root package and all sub-packages.
    """
    return [
        dirpath
        for dirpath, dirnames, filenames in os.walk(package)
        if os.path.exists(os.path.join(dirpath, "__init__.py"))
    ]


setup(
    name="balancedgl",
    python_requires=">=3.8",
    version=get_version("balancedgl"),
    license="BSD",
    description="Learning balanced signed graph Laplacians from data.",
    long_description=get_long_description(),
    long_description_content_type="text/markdown",
    packages=get_packages("balancedgl"),
    package_data={"balancedgl": ["py.typed"]},
    data_files=[("", ["LICENSE.md"])],
    install_requires=[
        "networkx",
        "numba",
        "numpy",
        "pandas>=1.5",
        "pyyaml",
        "scipy>=1.6",
    ],
    entry_points={"console_scripts": ["balancedgl = balancedgl.cli:main"]},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
    ],
    zip_safe=False,
)

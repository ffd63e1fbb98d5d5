#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
This is a script for installing schwarzflow.

"""

from setuptools import setup

import schwarzflow

# Read README.txt and HISTORY.txt
with open("README.txt", "r") as f_readme:
    readme_content = f_readme.read()
with open("HISTORY.txt", "r") as f_history:
    history_content = f_history.read()

classifiers = ["Development Status :: 4 - Beta",
               "Intended Audience :: Science/Research",
               "License :: OSI Approved :: MIT License",
               "Operating System :: OS Independent",
               "Programming Language :: Python",
               "Programming Language :: Python :: 3",
               "Programming Language :: Python :: Implementation :: CPython",
               "Topic :: Scientific/Engineering :: Mathematics",
               "Topic :: Scientific/Engineering :: Physics"]

tests_require = ["pytest>=6", "hypothesis>=6"]

setup_args = {"name": "schwarzflow",
              "version": schwarzflow.__version__,
              "description": ("Numerical checks of the Ricci-flow "
                              "instability of Euclidean Schwarzschild."),
              "long_description": readme_content + "\n\n" + history_content,
              "author": schwarzflow.__author__,
              "packages": ["schwarzflow"],
              "provides": ["schwarzflow"],
              "classifiers": classifiers,
              "license": "MIT License",
              "keywords": ["ricci flow", "schwarzschild", "lichnerowicz",
                           "eigenvalue", "de turck", "ancient solution"],
              "python_requires": ">=3.8",
              "install_requires": ["numpy>=1.20", "scipy>=1.7"],
              "tests_require": tests_require,
              "extras_require": {"test": tests_require,
                                 "doc": ["sphinx"]},
              "entry_points": {"console_scripts":
                               ["schwarzflow = schwarzflow.cli:main"]}}

setup(**setup_args)

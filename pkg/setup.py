#!/usr/bin/env python
"""
Frixion - friction of ion chains in optical cavities
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

# The next line is removed because it causes issues in interpreting
# the package_data line, unfortunately
# from __future__ import unicode_literals

from setuptools import setup, find_packages
from frixion import __version__

long_description = """
Frixion computes the self-consistent equilibria of a chain of trapped ions
inside a driven optical cavity, where the cavity field both creates the
periodic potential the ions feel and is shifted by where the ions sit. It
classifies the friction phases of the chain (sliding, pinned or bistable)
across drive strength, cooperativity and detuning, analyses the linearized
cavity-phonon fluctuations (stability, cooling temperature) and computes the
spectrum of the light leaving the cavity."""

if __name__ == "__main__":

    setup(
        name="Frixion",
        version=__version__,
        description="Friction phases of ion chains in optical cavities",
        long_description=long_description,
        license="LGPL",
        classifiers=[
            "Development Status :: 4 - Beta",
            "Intended Audience :: Science/Research",
            "Topic :: Scientific/Engineering :: Physics",
            "License :: OSI Approved :: GNU Library or Lesser General Public"
            " License (LGPL)",
            "Programming Language :: Python :: 3",
        ],
        keywords=["trapped ions", "cavity QED", "nanofriction", "Frenkel-Kontorova"],
        packages=find_packages(exclude=["tests", "examples", "examples.*"]),
        package_data={"frixion": ["data/*.json"]},
        entry_points={
            "console_scripts": [
                "frixion = " "frixion.scripts.frixion:__main__",
            ]
        },
        # Requirements
        install_requires=["numpy", "scipy", "ase"],
        python_requires=">=3.7",
    )

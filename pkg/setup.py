# Copyright (c) 2026 The conditionalqmc authors. Licensed under MIT License.

import pathlib

from setuptools import find_packages, setup

here = pathlib.Path(__file__).parent.resolve()
long_description = (here / "README.md").read_text(encoding="utf-8")

setup(
    name="conditional-qmc",
    version="1.0.0",
    description="Conditional quasi-Monte Carlo for discontinuous option-pricing integrands",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests"]),
    python_requires=">=3.9, <4",
    install_requires=["attrs >= 21.3.0", "cattrs >= 23.1.2", "numpy >= 1.22", "scipy >= 1.9", "matplotlib >= 3.5"],
    package_data={"conditionalqmc": ["py.typed", "data/*.txt"]},
    entry_points={"console_scripts": ["cqmc = conditionalqmc.cli:main"]},
    license="MIT",
    classifiers=["License :: OSI Approved :: MIT License"],
)

#!/usr/bin/env python
# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

import re
import os.path
from io import open  # pylint: disable=W0622
from setuptools import setup, find_packages


package_folder_path = "softcp"

# Version extraction inspired from 'requests'
with open(os.path.join(package_folder_path, "_constants.py"), "r") as fd:
    VERSION = re.search(
        r'^VERSION\s*=\s*[\'"]([^\'"]*)[\'"]', fd.read(), re.MULTILINE
    ).group(1)


CLASSIFIERS = [
    "Development Status :: 4 - Beta",
    "Intended Audience :: Science/Research",
    "Intended Audience :: Healthcare Industry",
    "Topic :: Scientific/Engineering :: Medical Science Apps.",
    "Topic :: Scientific/Engineering :: Image Processing",
    "Programming Language :: Python",
    "Programming Language :: Python :: 3",
    "Programming Language :: Python :: 3.9",
    "Programming Language :: Python :: 3.10",
    "Programming Language :: Python :: 3.11",
    "Programming Language :: Python :: 3.12",
    "License :: OSI Approved :: MIT License",
]

# knack drives the command line (parser, help, logging, output formatting).
# scipy >= 1.12 is required for the 'rtol' keyword of scipy.sparse.linalg.cg and the
# 'radius'/'axes' keywords of scipy.ndimage.gaussian_filter.
DEPENDENCIES = [
    "knack>=0.10.0",
    "jsonschema>=3.2.0",
    "PyYAML>=5.4",
    "numpy>=1.22",
    "scipy>=1.12",
    "pypng>=0.20220715.0",
    "matplotlib>=3.5",
]

TEST_DEPENDENCIES = ["pytest>=7.0", "pytest-mock>=3.10"]


setup(
    name="softcp",
    version=VERSION,
    description="Soft copy-paste data augmentation for medical lesion segmentation datasets",
    long_description="Offline copy-paste augmentation with soft-mask blending and anatomical placement "
    "constraints. Builds a lesion bank from annotated image/mask pairs and writes reproducible "
    "synthetic datasets with a provenance manifest.",
    license="MIT",
    author="softcp contributors",
    classifiers=CLASSIFIERS,
    packages=find_packages(exclude=["tests", "*.tests", "*.tests.*", "scripts"]),
    package_data={"softcp": ["assets/run-config.schema.json", "assets/default-config.yaml"]},
    install_requires=DEPENDENCIES,
    extras_require={"test": TEST_DEPENDENCIES},
    python_requires=">=3.9",
    entry_points={"console_scripts": ["softcp=softcp.__main__:main"]},
)

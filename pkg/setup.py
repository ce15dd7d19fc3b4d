#!/usr/bin/env python
# -*- coding: utf-8 -*-

# ======================================================================
# Copyright 2017 Julien LE CLEACH
# 
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# 
#     http://www.apache.org/licenses/LICENSE-2.0
# 
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ======================================================================

import os
import sys

from setuptools import setup, find_packages

if sys.version_info[:2] < (3, 8):
    msg = ("decoykey requires Python 3.8 or later.  You are using version %s.  Please "
           "install using a supported version." % sys.version)
    sys.stderr.write(msg)
    sys.exit(1)

requires = ['supervisor >= 4.0.0', 'numpy >= 1.17.0', 'scipy >= 1.7.0']

tests_require = ['mock >= 2.0.0', 'hypothesis >= 4.0.0']
testing_extras = tests_require + ['pytest >= 2.5.2', 'pytest-cov']

here = os.path.abspath(os.path.dirname(__file__))
try:
    README = open(os.path.join(here, 'README.rst')).read()
    CHANGES = open(os.path.join(here, 'CHANGES.txt')).read()
except:
    README = """decoykey computes the finite-key secret key rate of four-intensity decoy-state BB84. """
    CHANGES = ''

CLASSIFIERS = [
    "License :: OSI Approved :: Apache Software License",
    "Development Status :: 4 - Beta",
    "Intended Audience :: Science/Research",
    "Natural Language :: English",
    "Environment :: Console",
    "Operating System :: POSIX :: Linux",
    "Programming Language :: Python :: 3",
    "Topic :: Scientific/Engineering :: Physics",
    "Topic :: Security :: Cryptography"
]

version_txt = os.path.join(here, 'decoykey/version.txt')
decoykey_version = open(version_txt).read().split('=')[1].strip()

dist = setup(
    name='decoykey',
    version=decoykey_version,
    description="Finite-Key Analysis and Simulation of Decoy-State BB84",
    long_description=README + '\n\n' + CHANGES,
    classifiers=CLASSIFIERS,
    author="Julien Le Cléach",
    author_email="julien.6387.dev@gmail.com",
    platforms=[
        "CentOS 7.2"
    ],
    packages=find_packages(),
    install_requires=requires,
    extras_require={'testing': testing_extras},
    tests_require=tests_require,
    include_package_data=True,
    zip_safe=False,
    entry_points={'console_scripts': ['decoykeyctl = decoykey.decoykeyctl:main']},
    test_suite="decoykey.tests",
)

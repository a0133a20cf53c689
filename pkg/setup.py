#!/usr/bin/env python

import os
import re
import shlex
import sys

from codecs import open

from setuptools import Command, setup


class PyTest(Command):
    user_options = [('pytest-args=', 'a', "Arguments to pass into py.test")]

    def initialize_options(self):
        self.pytest_args = ''

    def finalize_options(self):
        pass

    def run(self):
        import pytest

        errno = pytest.main(shlex.split(self.pytest_args))
        sys.exit(errno)


assert sys.version_info >= (3, 7), "We only support Python 3.7+"

if sys.argv[-1] == 'publish':
    os.system('python setup.py sdist upload')
    sys.exit()

packages = [
    'pybilin',
]

requires = [
    'sympy>=1.12',
]
test_requirements = [
    'pytest==7.4.4',
    'hypothesis==6.98.0',
    'pytest-cov',
]

with open('pybilin/__init__.py', 'r') as fd:
    version = re.search(r'^__version__\s*=\s*[\'"]([^\'"]*)[\'"]',
                        fd.read(), re.MULTILINE).group(1)

if not version:
    raise RuntimeError('Cannot find version information')

with open('README.md', 'r', 'utf-8') as f:
    readme = f.read()

setup(
    name='pybilin',
    version=version,
    description='Exact bilinearized contact homology of free graded-commutative DGAs',
    long_description=readme,
    long_description_content_type='text/markdown',
    author='Transcovo',
    author_email='tech-data@chauffeur-prive.com',
    packages=packages,
    package_data={'': ['LICENSE'], 'pybilin': ['data/*.json']},
    package_dir={'pybilin': 'pybilin'},
    include_package_data=True,
    install_requires=requires,
    entry_points={'console_scripts': ['pybilin = pybilin.cli:main']},
    license='Apache 2.0',
    zip_safe=False,
    classifiers=(
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'Natural Language :: English',
        'License :: OSI Approved :: Apache Software License',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ),
    cmdclass={'test': PyTest},
    tests_require=test_requirements,
)

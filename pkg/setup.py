###############################################################################
# SupOptics Setup                                                             #
###############################################################################

import setuptools
from pathlib import Path


# -- Read Files -- #
long_description = Path('README.md').read_text()
required = Path('requirements.txt').read_text().splitlines()

setuptools.setup(
    name='supoptics',
    version='0.1.0',
    description='Nonclassicality witnesses for SUP-operated coherent and thermal states of light',
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=setuptools.find_packages(exclude=['tests']),
    classifiers=[
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.8',
    install_requires=required,
    extras_require={'test': ['pytest', 'hypothesis']},
    entry_points={'console_scripts': ['supoptics=supoptics.cli:run']},
    include_package_data=True
)

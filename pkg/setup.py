#!/usr/bin/python
# Root manifest so the package can be installed from the repository root;
# mirrors scaling/setup.py, with package discovery pointed at scaling/.

from setuptools import setup, find_packages

setup(
    name="rocscale",
    package_dir={"": "scaling"},
    packages=find_packages("scaling", exclude=("tests", "tests.*")),
    include_package_data=True,
    zip_safe=False,
    python_requires=">=3.8",
    install_requires=[
        "click>=7.0",
        "numpy>=1.17",
        "PyYAML",
        "scipy",
        "statsd",
        "ujson>=5.0",
    ],
    extras_require={"test": ["pytest"], "journal": ["systemd-python"]},
    entry_points={"console_scripts": ["rocscale = rocscale.cli:cli",]},
)

#!/usr/bin/python

from setuptools import setup, find_packages

setup(
    name="rocscale",
    packages=find_packages(exclude=("tests", "tests.*")),
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

"""
Setup configuration for deltajet.
"""

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="deltajet",
    version="0.1.0",
    description="Arithmetic jet spaces, p-derivations and δ-characters",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=("tests",)),
    python_requires=">=3.8",
    install_requires=[
        "sympy>=1.13",
    ],
    entry_points={
        "console_scripts": [
            "deltajet = deltajet.cli:main",
        ],
    },
    extras_require={
        "dev": [
            "pytest>=6.0.0",
            "black>=21.0.0",
            "flake8>=3.8.0",
        ],
    },
)

"""Setup configuration for bianchi-lvalues."""
from setuptools import setup

# Read requirements
with open("requirements.txt") as f:
    requirements = f.read().splitlines()

setup(
    name="bianchi-lvalues",
    version="1.0.0",
    description="Twisted L-values of base-change Bianchi modular forms with complex and p-adic functional-equation checks",
    author="bianchi-lvalues",
    python_requires=">=3.8",
    # Include all Python files in the project root
    py_modules=[
        'cli',
        'config',
        'errors',
        'quadfield',
        'hecke_chars',
        'coefficient_cache',
        'data_loader',
        'reports',
        'renderer',
        'validators',
    ],
    # Include packages (subfolders with __init__.py)
    packages=['forms', 'lfun', 'padic'],
    install_requires=requirements,
    entry_points={
        "console_scripts": [
            "bianchi=cli:cli",
        ],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
    ],
)

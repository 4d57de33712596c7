from setuptools import find_packages, setup

setup(
    name="levinson",
    version="0.1.0",
    description="Levinson theorem, spectral shift and spectral flow checks for radial potentials",
    packages=find_packages(exclude=("tests",)),
    python_requires=">=3.9",
    install_requires=[
        "python-dotenv>=1.0.0",
        "pandas>=2.2.0",
        "numpy>=1.26.4",
        "scipy>=1.11.0",
        "loguru>=0.7.2",
    ],
    extras_require={"test": ["pytest", "pytest-asyncio"]},
    entry_points={"console_scripts": ["levinson=Levinson.cli:main"]},
)

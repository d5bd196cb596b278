from setuptools import find_packages, setup

with open("requirements.txt", encoding="utf-8") as fh:
    requirements = [
        line.strip() for line in fh
        if line.strip() and not line.startswith("#") and not line.startswith("pytest")
    ]

setup(
    name="primesums",
    version="1.0.0",
    description="Exact counts and constructive witnesses for k-fold sums of primes from dense subsets",
    packages=find_packages(exclude=("tests", "tests.*", "examples", "examples.*")),
    python_requires=">=3.9",
    install_requires=requirements,
    extras_require={"test": ["pytest==7.4.3"]},
    entry_points={"console_scripts": ["primesums=primesums.cli.main:main"]},
)

from setuptools import setup, find_packages

requirements = [
    "numpy >= 1.18.0",
    "scipy >= 1.9.0",
    "mlflow >= 1.2.0",
    "tqdm >= 4.64.1",
    "PyYAML >= 5.4",
]

extras = {
    "test": ["pytest >= 7.0"],
}

setup(
    name="squeezecheck",
    packages=find_packages(exclude=["tests", "tests.*"]),
    description="Steady-state simulator of squeezed light from a driven single-photon emitter in a lossy cavity",
    author="Andrei Ilie",
    author_email="andrei0758@gmail.com",
    include_package_data=True,
    python_requires=">=3.8.0",
    install_requires=requirements,
    extras_require=extras,
    entry_points={"console_scripts": ["squeezecheck = squeezecheck.cli:main"]},
)

# setup.py
from setuptools import setup, find_packages

setup(
    name="regprop",
    version="0.1",
    packages=find_packages(exclude=["tests", "examples", "examples.*"]),
    py_modules=["regprop"],
    install_requires=[
        "numpy",
        "scipy",
        "pandas",
        "python-dotenv",
        "PyYAML",
        "tqdm",
    ],
    entry_points={"console_scripts": ["regprop=app:main"]},
)

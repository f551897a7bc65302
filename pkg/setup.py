import pkg_resources
from setuptools import find_packages, setup

setup(
    name="unn",
    py_modules=["unn"],
    version="0.1.0",
    description="UNN: uncertain nearest neighbor classification of objects described by pdfs.",
    long_description=open("README.md", "r", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
    readme="README.md",
    license="MIT",
    packages=find_packages(include=["unn", "unn.*"]),
    package_data={"unn": ["conf/*.yaml"]},
    python_requires=">=3.8",
    install_requires=[
        str(r)
        for r in pkg_resources.parse_requirements(
            open("requirements.txt", "r", encoding="utf-8").read()
        )
    ],
    extras_require={"tests": ["pytest", "hypothesis"]},
    entry_points={"console_scripts": ["unn=unn.cli:main"]},
    include_package_data=True,
)

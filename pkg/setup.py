from setuptools import find_packages, setup


def read_requirements(path="requirements.txt"):
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip() and not line.startswith("#")]


setup(
    name="spatial-qsr",
    version="1.0.0",
    description="Viewpoint-aware qualitative spatial relations between 3D objects seen by a mobile robot",
    packages=find_packages(include=["app", "app.*"]),
    python_requires=">=3.9",
    install_requires=read_requirements(),
    extras_require={
        "test": ["pytest>=7.0", "hypothesis>=6.0"],
    },
    entry_points={
        "console_scripts": [
            "spatial-qsr=app.main:main",
        ],
    },
)

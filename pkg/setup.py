from setuptools import setup, find_packages
import os

# Read the contents of README file
this_directory = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(this_directory, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name="lv-spreading-toolkit",
    version="0.1.0",
    description="Spreading speeds of the monostable Lotka-Volterra competition-diffusion system on planar domains.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    author="LV Spreading Toolkit contributors",
    packages=find_packages(include=["spreading*", "schemes*", "helper*"]),
    py_modules=["app"],
    install_requires=[
        "numpy>=1.22",
        "scipy>=1.12",
        "pyyaml>=6.0",
        "python-dotenv>=0.19.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0",
            "pytest-cov>=2.0",
            "hypothesis>=6.0",
            "black>=21.0",
            "flake8>=3.8",
        ],
    },
    entry_points={
        "console_scripts": [
            "lv-spread=app:main",
        ]
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
    ],
    keywords="reaction-diffusion lotka-volterra spreading-speed traveling-waves finite-volume",
    include_package_data=True,
    package_data={
        "": ["*.md", "*.txt", "*.yml", "*.yaml"],
    },
    python_requires=">=3.9",
    zip_safe=False,
)

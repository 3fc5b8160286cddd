from setuptools import setup, find_packages

setup(
    name="qbm-doubled",
    version="1.0.0",
    description="Doubled-coordinate quantum Brownian motion: diffraction, master equation, Langevin and dissipative flux",
    author="Your Name",
    author_email="your.email@example.com",
    packages=find_packages(exclude=["tests", "tests.*"]),
    py_modules=["run_cli"],
    install_requires=[
        "numpy>=1.22.0",
        "scipy>=1.10.0",
        "pandas>=1.5.0",
        "python-dotenv>=0.19.0",
        "tqdm>=4.60.0"
    ],
    extras_require={
        "dev": [
            "pytest>=7.0.0",
            "black>=22.0.0",
            "flake8>=4.0.0",
            "mypy>=1.0.0"
        ]
    },
    python_requires=">=3.8",
    entry_points={
        "console_scripts": [
            "qbm=run_cli:main"
        ]
    }
)

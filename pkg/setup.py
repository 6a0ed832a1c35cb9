import os.path
from setuptools import setup, find_packages


home = os.path.dirname(os.path.abspath(__file__))

__version__ = '0.0.0'
exec(open(os.path.join(home, 'nomashield/version.py')).read())

with open(os.path.join(home, 'README.md')) as f:
    readme = f.read()

with open(os.path.join(home, 'requirements.txt')) as f:
    requirements = [item.strip() for item in f if item.strip()]


setup(
    name='noma-shield',
    version=__version__,
    description='Signal-alignment MIMO-NOMA simulator with physical-layer-security analysis.',
    long_description=readme,
    long_description_content_type='text/markdown',
    license='Apache-2.0 License',
    python_requires='>=3.10',
    packages=find_packages(exclude=['tests', 'tests.*']),
    install_requires=requirements,
    entry_points={
        'console_scripts': [
            'noma-shield=nomashield.cli.main:entry',
        ],
    },
)

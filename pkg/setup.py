from setuptools import setup

import finitegap

setup(
  name='finitegap',
  version=finitegap.__version__,
  description='Finite-gap solutions of the KdV equation',
  license='License :: OSI Approved :: MIT License',
  packages=['finitegap', 'finitegap.examples'],
  install_requires=[
    'numpy>=1.17',
    'scipy>=1.3'
  ],
  python_requires='>=3.6',
  zip_safe=False,
  # Include shipped configs.
  package_data = {
    'finitegap.examples': ['configs/*.json']
  },
  entry_points={
    'console_scripts': ['finitegap=finitegap.cli:run']
  }
)

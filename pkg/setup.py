import runpy

from setuptools import setup

# Read version without importing the package (dependencies may be missing).
version = runpy.run_path('polyslice/_version.py')['FALLBACK_VERSION']

setup(name='polyslice',
      version=version,
      description='Central hyperplane sections of the polydisc: section '
      'volumes, explicit bounds and verification sweeps',
      keywords='polydisc hyperplane sections Bessel Fourier',
      license='BSD',
      packages=['polyslice', 'polyslice.tests'],
      python_requires='>=3.8',
      install_requires=['colorama', 'joblib', 'numpy', 'pandas',
                        'path-helpers', 'pydash', 'ruamel.yaml', 'scipy'],
      extras_require={'test': ['pytest']},
      entry_points={'console_scripts':
                    ['polyslice = polyslice.__main__:main']})

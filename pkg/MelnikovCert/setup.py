from setuptools import setup

setup(
	name='MelnikovCert',
	version='',
	packages=[''],
	package_dir={'': 'MelnikovCert'},
	package_data={'': ['defaults.ini']},
	install_requires=['cachetools', 'numpy', 'progressbar2', 'scipy'],
	tests_require=['hypothesis'],
	license='CC-BY-4.0',
	description='Melnikov integrals along complex-time loops and nonintegrability certificates for the restricted three-body problem'
)

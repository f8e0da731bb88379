import argparse
import logging
import math
from pathlib import Path

from . import progname
from . import commands

loglevels = dict(logging._nameToLevel)
del loglevels['NOTSET']
del loglevels['WARN']

systems = ['crtbp-planar', 'crtbp-spatial']
forms = ['simplified', 'raw', 'anomaly']


def str2bool(v):
	if isinstance(v, bool):
		return v
	if v.lower() in ('yes', 'true', 't', 'y', '1'):
		return True
	elif v.lower() in ('no', 'false', 'f', 'n', '0'):
		return False
	else:
		raise argparse.ArgumentTypeError('Boolean value expected.')


def float_list(v):
	"""Comma-separated floats, eg. ``0.2,0.5,0.8``."""
	if isinstance(v, (list, tuple)):
		return [float(x) for x in v]
	try:
		return [float(x) for x in str(v).split(',') if x.strip()]
	except ValueError:
		raise argparse.ArgumentTypeError(f'List of numbers expected: {v}')


def theta_grid(v):
	"""
	A comma-separated list of explicit angles; ``0`` is the single angle zero. An empty
	value gives no angles, and :func:`~MelnikovCert.config.setup` then uses ``--n-theta``.
	"""
	if v is None or isinstance(v, list):
		return v
	return float_list(v)


def even_angles(n: int):
	"""``n`` angles evenly spaced over :math:`[0, \\pi)`."""
	return [k*math.pi/n for k in range(n)]


def optional_int(v):
	if v is None or str(v).strip() == '':
		return None
	return int(v)


def get_orbit_argparser():
	orbitparser = argparse.ArgumentParser(add_help=False)

	orbitparser.add_argument('--e', metavar='E[,E...]', type=float_list, help='Eccentricities of the resonant orbits')
	orbitparser.add_argument('--mu', type=float, help='Mass ratio')
	orbitparser.add_argument('--i1', type=float, help='First action I1* of the resonant torus')

	return orbitparser


def get_contour_argparser():
	contourparser = argparse.ArgumentParser(add_help=False)

	contourparser.add_argument('--delta', type=float, help='Arc radius around the singular times, in units of K1/omega1')
	contourparser.add_argument('--big-m', dest='big_m', type=float, help='Height of the top segment, in units of K1/omega1')
	contourparser.add_argument('--side', type=str, help='Side of the arcs (left or right)')
	contourparser.add_argument('--tol', type=float, help='Quadrature tolerance')

	return contourparser


def get_sweep_argparser():
	sweepparser = argparse.ArgumentParser(add_help=False)

	sweepparser.add_argument('--n-theta', dest='n_theta', type=int, help='Number of angles evenly spaced over [0, pi)')
	sweepparser.add_argument('--theta-grid', dest='theta_grid', type=theta_grid, help='Comma-separated list of angles, overriding --n-theta')
	sweepparser.add_argument('--e-min', dest='e_min', type=float, help='Smallest eccentricity of the K1 curve')
	sweepparser.add_argument('--e-max', dest='e_max', type=float, help='Largest eccentricity of the K1 curve')
	sweepparser.add_argument('--n', type=int, help='Number of points on the K1 curve')

	return sweepparser


def get_root_argparser(defaults=None):
	if defaults is None:
		defaults = dict()

	rootparser = argparse.ArgumentParser(prog=progname, description='Melnikov integrals and nonintegrability certificates for the restricted three-body problem')

	rootparser.add_argument('--loglevel', type=str, help='Log level', choices=loglevels.keys(), default='INFO')
	rootparser.add_argument('--jobs', type=optional_int, help='Number of worker processes (default: all available)')
	rootparser.add_argument('--backup', type=str2bool, help='Move existing output files aside before writing')
	rootparser.set_defaults(**defaults)

	subparsers = rootparser.add_subparsers(dest='command', help='Choose command')

	k1parser = subparsers.add_parser('k1-curve', help="""
		Tabulate the singular phase K1 against the eccentricity.

		Writes a CSV file with the columns ``e,K1`` for ``--n`` eccentricities evenly spaced
		over ``[--e-min, --e-max]``.
	""")
	k1parser.add_argument('--out', type=Path, default=Path('k1_curve.csv'), help='Output file (CSV)')
	k1parser.set_defaults(func=commands.do_k1_curve)

	melnikovparser = subparsers.add_parser('melnikov', help="""
		Evaluate the planar Melnikov integral over the grid of eccentricities and angles.

		Each record carries the value, its error estimate, and whether it is certified to be
		nonzero.
	""")
	melnikovparser.add_argument('--form', choices=forms, default='simplified', help='Form of the integrand')
	melnikovparser.add_argument('--turns', type=int, default=0, help='Also integrate around the singular time this many times (0: off)')
	melnikovparser.add_argument('--out', type=Path, default=Path('melnikov.jsonl'), help='Output file (JSON lines)')
	melnikovparser.set_defaults(func=commands.do_melnikov)

	spatialparser = subparsers.add_parser('melnikov-spatial', help='Evaluate the spatial Melnikov integral on the equatorial family')
	spatialparser.add_argument('--out', type=Path, default=Path('melnikov_spatial.jsonl'), help='Output file (JSON lines)')
	spatialparser.set_defaults(func=commands.do_melnikov_spatial)

	monodromyparser = subparsers.add_parser('monodromy', help="""
		Compute the monodromy of the reduced variational equation around the complex loop
		and around the real period.
	""")
	monodromyparser.add_argument('--system', choices=systems, default='crtbp-planar', help='System to analyse')
	monodromyparser.add_argument('--subdivide', type=int, default=3, help='Base frequency is omega1 divided by this')
	monodromyparser.add_argument('--out', type=Path, default=Path('monodromy.jsonl'), help='Output file (JSON lines)')
	monodromyparser.set_defaults(func=commands.do_monodromy)

	certifyparser = subparsers.add_parser('certify', help="""
		Run the nonintegrability certificate over the grid.

		A record is POSITIVE when both monodromy witnesses exceed ten times their error
		estimates, INCONCLUSIVE otherwise.
	""")
	certifyparser.add_argument('--system', choices=systems, default='crtbp-planar', help='System to analyse')
	certifyparser.add_argument('--subdivide', type=int, default=3, help='Base frequency is omega1 divided by this')
	certifyparser.add_argument('--out', type=Path, default=Path('certificates.jsonl'), help='Output file (JSON lines)')
	certifyparser.set_defaults(func=commands.do_certify)

	gammaparser = subparsers.add_parser('gamma-dump', help='Write the integration loop for each eccentricity as JSON')
	gammaparser.add_argument('--out', type=Path, default=Path('gamma.json'), help='Output file (JSON)')
	gammaparser.set_defaults(func=commands.do_gamma_dump)

	return rootparser

import configparser
import logging
import os
import pathlib
import sys
from pprint import pformat

import progressbar

from . import progname
from .cli import even_angles, loglevels, get_contour_argparser, get_orbit_argparser, get_root_argparser, get_sweep_argparser


def validate(args):
	"""
	Check the parsed settings before any computation.

	:return: A list of problems, empty when the settings are usable.
	"""
	problems = []
	for e in args.e or []:
		if not 0 < e < 1:
			problems.append(f'Eccentricity must lie in (0, 1): {e}')
	if args.mu is not None and not 0 < args.mu < 1:
		problems.append(f'Mass ratio must lie in (0, 1): {args.mu}')
	if args.i1 is not None and not args.i1 > 0:
		problems.append(f'I1* must be positive: {args.i1}')
	if args.side not in ('left', 'right'):
		problems.append(f'Side must be left or right: {args.side}')
	if not 0 < args.delta < args.big_m:
		problems.append(f'Need 0 < delta < big-m: {args.delta}, {args.big_m}')
	if not args.tol > 0:
		problems.append(f'Tolerance must be positive: {args.tol}')
	if not 0 < args.e_min < args.e_max < 1:
		problems.append(f'Need 0 < e-min < e-max < 1: {args.e_min}, {args.e_max}')
	if args.n_theta is None or args.n_theta < 0:
		problems.append(f'The number of angles must be non-negative: {args.n_theta}')
	if not args.n >= 2:
		problems.append(f'The K1 curve needs at least two points: {args.n}')
	if getattr(args, 'subdivide', 1) < 1:
		problems.append(f'Subdivision must be a positive integer: {args.subdivide}')
	return problems


def setup(args, configfiles=['MelnikovCert.ini']):
	progressbar.streams.wrap_stderr()

	config = configparser.RawConfigParser()
	config.optionxform = lambda option: option
	config.read(pathlib.Path(__file__).parent.joinpath('defaults.ini'))
	config.read(configfiles, encoding='utf-8')

	# each ini section feeds its own parser

	settings = dict()
	for section, get_parser in (('orbit', get_orbit_argparser), ('contour', get_contour_argparser), ('sweep', get_sweep_argparser)):
		parser = get_parser()
		parser.set_defaults(**dict(config.items(section)))
		(sectionconfig, args) = parser.parse_known_args(args)
		settings.update(vars(sectionconfig))

	# the rest belongs to the root parser and the chosen subcommand

	rootparser = get_root_argparser(dict(config.items('configuration')))

	# second pass picks up root flags given after the subcommand
	args = rootparser.parse_known_args(args)
	args = rootparser.parse_args(args[1], args[0])

	if args.command is None:
		rootparser.print_help()
		print('\nERROR: You must choose a command.')
		exit(-1)

	for key, value in settings.items():
		setattr(args, key, value)
	if not args.theta_grid:
		args.theta_grid = even_angles(args.n_theta or 0)
	if args.jobs is None:
		args.jobs = os.cpu_count() or 1

	problems = validate(args)
	if problems:
		rootparser.print_help()
		for problem in problems:
			print(f'\nERROR: {problem}')
		exit(-1)

	logging.basicConfig(
		stream=sys.stdout,
		format='%(asctime)s - %(levelname)8s - %(name)s - %(message)s',
		level=loglevels[args.loglevel],
	)
	log = logging.getLogger(progname)

	log.info(f'Configuration for this invocation:\n{pformat(vars(args))}')

	return args

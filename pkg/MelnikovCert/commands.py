import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, Tuple

import numpy as np
import progressbar

from . import progname
from .crtbp import SpatialCRTBP
from .fileio import FileIO
from .kepler_core import KeplerOrbit, k1
from .melnikov import (ContourParams, GenericSystem, MelnikovResult, melnikov_anomaly_form, melnikov_planar,
                       melnikov_planar_raw, melnikov_spatial, small_circle)
from .variational import certify_nonintegrability, crtbp_resonance, monodromy_gamma, monodromy_period

RUN_KEYS = ['command', 'e', 'mu', 'i1', 'theta_grid', 'delta', 'big_m', 'tol', 'side', 'subdivide', 'form', 'system', 'turns', 'e_min', 'e_max', 'n']

forms = {
	'simplified': melnikov_planar,
	'raw': melnikov_planar_raw,
	'anomaly': melnikov_anomaly_form,
}


##########################################################################################


def run_config(config) -> Dict:
	"""The data-relevant part of the configuration."""
	return {key: getattr(config, key) for key in RUN_KEYS if hasattr(config, key)}


def config_hash(config) -> str:
	return hashlib.sha256(json.dumps(run_config(config), sort_keys=True).encode('utf-8')).hexdigest()


def contour_params(config) -> ContourParams:
	return ContourParams(config.delta, config.big_m, config.side, config.tol)


def _pairs(value) -> List[List[float]]:
	return [[float(z.real), float(z.imag)] for z in np.atleast_1d(np.asarray(value, dtype=complex))]


def _failure(record: Dict, error: Exception) -> Dict:
	logging.getLogger(f'{__name__}._failure').error(f'{record}: {error}')
	return {**record, 'error': f'{error.__class__.__name__}: {error}', 'verdict': None}


def _melnikov_record(result: MelnikovResult) -> Dict:
	return {
		'value': _pairs(result.value),
		'error_estimate': result.error_estimate,
		'margin': result.margin,
		'verdict': result.nonzero_verdict,
	}


def _system(name: str, mu: float) -> GenericSystem:
	return GenericSystem.for_type(name).build(mu=mu)


def _theta_vector(system: GenericSystem, theta: float) -> np.ndarray:
	"""Radial angle zero, the sweep angle in the last slot."""
	vector = np.zeros(system.m)
	vector[-1] = theta
	return vector


##########################################################################################


def melnikov_task(task: Tuple) -> Dict:
	form, e, mu, i1, theta, params, turns = task
	record = {'e': e, 'mu': mu, 'I1star': i1, 'theta': theta, 'form': form}
	try:
		record.update(_melnikov_record(forms[form](e, mu, i1, theta, params)))
		if turns:
			circle = small_circle(e, mu, i1, theta, turns=turns, tol=params.tol)
			record['small_circle'] = _pairs(circle.value)
	except (ArithmeticError, ValueError) as error:
		return _failure(record, error)
	return record


def spatial_task(task: Tuple) -> Dict:
	e, mu, i1, theta, params = task
	record = {'e': e, 'mu': mu, 'I1star': i1, 'theta': theta, 'form': 'spatial'}
	try:
		record.update(_melnikov_record(melnikov_spatial(e, mu, i1, theta, params)))
	except (ArithmeticError, ValueError) as error:
		return _failure(record, error)
	return record


def _crtbp_setup(name: str, e: float, mu: float, i1: float, params: ContourParams, subdivide: int):
	system = _system(name, mu)
	orbit = KeplerOrbit.resonant(e, mu, i1)
	res = crtbp_resonance(orbit, subdivide, spatial=isinstance(system, SpatialCRTBP))
	return system, res, params.to_gamma(orbit)


def monodromy_task(task: Tuple) -> Dict:
	name, e, mu, i1, theta, params, subdivide = task
	record = {'e': e, 'mu': mu, 'I1star': i1, 'theta': theta, 'system': name}
	try:
		system, res, gamma = _crtbp_setup(name, e, mu, i1, params, subdivide)
		theta_vec = _theta_vector(system, theta)
		loop, error = monodromy_gamma(system, res, theta_vec, gamma, params.tol)
		period, _ = monodromy_period(system, res, theta_vec, params.tol)
		record.update({'M_gamma': loop, 'M_bar': period, 'error_estimate': error, 'T_star': res.T_star})
	except (ArithmeticError, ValueError) as error:
		return _failure(record, error)
	return record


def certify_task(task: Tuple) -> Dict:
	name, e, mu, i1, theta, params, subdivide = task
	record = {'e': e, 'mu': mu, 'I1star': i1, 'theta': theta, 'system': name}
	try:
		system, res, gamma = _crtbp_setup(name, e, mu, i1, params, subdivide)
		certificate = certify_nonintegrability(system, res, _theta_vector(system, theta), gamma, params.tol)
		record.update({**certificate.to_dict(), 'error_estimate': certificate.error_estimate, 'theta': theta})
	except (ArithmeticError, ValueError) as error:
		return _failure(record, error)
	return record


def run_grid(tasks: List[Tuple], worker: Callable[[Tuple], Dict], jobs: int) -> List[Dict]:
	"""
	Evaluate ``worker`` on every task, in a process pool unless ``jobs`` is 1. The records
	come back sorted by their grid key, whatever the completion order.
	"""
	log = logging.getLogger(f'{__name__}.run_grid')
	if not tasks:
		return []
	log.info(f'Evaluating {len(tasks)} grid points with {jobs} job(s)')
	if jobs == 1:
		records = [worker(task) for task in progressbar.progressbar(tasks)]
	else:
		with ProcessPoolExecutor(max_workers=jobs) as executor:
			records = list(progressbar.progressbar(executor.map(worker, tasks), max_value=len(tasks)))
	return sorted(records, key=lambda r: (r['e'], r['theta']))


def _finish(config, records: List[Dict]):
	log = logging.getLogger(f'{progname}.{config.command}')
	stamp = config_hash(config)
	for record in records:
		record['config_hash'] = stamp
	FileIO.save(records, config.out, backup=config.backup)
	failures = [r for r in records if isinstance(r.get('error'), str)]
	if failures:
		log.error(f'{len(failures)} of {len(records)} records failed')
		raise SystemExit(-1)
	log.info(f'{len(records)} records written to {config.out}')


##########################################################################################


def do_k1_curve(config):
	rows = [{'e': f'{e:.10g}', 'K1': f'{k1(e):.10g}'} for e in np.linspace(config.e_min, config.e_max, config.n)]
	FileIO.save(rows, config.out, backup=config.backup)


def do_melnikov(config):
	params = contour_params(config)
	tasks = [(config.form, e, config.mu, config.i1, theta, params, config.turns) for e in config.e for theta in config.theta_grid]
	_finish(config, run_grid(tasks, melnikov_task, config.jobs))


def do_melnikov_spatial(config):
	params = contour_params(config)
	tasks = [(e, config.mu, config.i1, theta, params) for e in config.e for theta in config.theta_grid]
	_finish(config, run_grid(tasks, spatial_task, config.jobs))


def do_monodromy(config):
	params = contour_params(config)
	tasks = [(config.system, e, config.mu, config.i1, theta, params, config.subdivide) for e in config.e for theta in config.theta_grid]
	_finish(config, run_grid(tasks, monodromy_task, config.jobs))


def do_certify(config):
	params = contour_params(config)
	tasks = [(config.system, e, config.mu, config.i1, theta, params, config.subdivide) for e in config.e for theta in config.theta_grid]
	_finish(config, run_grid(tasks, certify_task, config.jobs))


def do_gamma_dump(config):
	params = contour_params(config)
	loops = []
	for e in config.e:
		orbit = KeplerOrbit.resonant(e, config.mu, config.i1)
		loops.append({'e': e, 'mu': config.mu, 'I1star': config.i1, 'contour': params.to_gamma(orbit), 'config_hash': config_hash(config)})
	FileIO.save(loops, config.out, backup=config.backup)

import math
import pathlib

import numpy as np

from MelnikovCert.melnikov import ContourParams, GenericSystem, melnikov_planar


class MockConfig(object):
	def __init__(self, **kwargs):
		self.command = 'melnikov'
		self.e = [0.5]
		self.mu = 0.3
		self.i1 = 1.0
		self.theta_grid = [0.0]
		self.delta = 0.05
		self.big_m = 10.0
		self.side = 'left'
		self.tol = 1e-10
		self.e_min = 0.05
		self.e_max = 0.95
		self.n = 200
		self.jobs = 1
		self.backup = False
		self.form = 'simplified'
		self.turns = 0
		self.system = 'crtbp-planar'
		self.subdivide = 3
		self.out = pathlib.Path('out.jsonl')
		for key, value in kwargs.items():
			setattr(self, key, value)


def periodic_function(T: float):
	"""Entire and T-periodic, bounded in the upper half plane."""
	def f(t):
		return np.exp(2j*math.pi*t/T) + 0.5*np.exp(4j*math.pi*t/T)
	return f


def zero_system(ell: int = 2, m: int = 2, omega=None, d_omega=None) -> GenericSystem:
	return GenericSystem(
		name='zero',
		ell=ell,
		m=m,
		omega=omega or (lambda I: np.r_[1.0, np.zeros(m - 1)]),
		d_omega=d_omega or (lambda I: np.eye(m, ell)),
		h_k=lambda I, theta: np.zeros((ell, np.shape(theta)[1])),
		g_k=lambda I, theta: np.zeros((m, np.shape(theta)[1])),
		k=5,
	)


def trig_system(omega: float = 1.0, slope: float = 2.0) -> GenericSystem:
	"""One action, one angle: h = cos(theta), g = sin(theta), D omega = slope."""
	return GenericSystem(
		name='trig',
		ell=1,
		m=1,
		omega=lambda I: np.array([omega]),
		d_omega=lambda I: np.array([[slope]]),
		h_k=lambda I, theta: np.cos(theta),
		g_k=lambda I, theta: np.sin(theta),
		k=0,
	)


_planar_results = dict()


def planar_result(e: float, mu: float, theta2: float, params: ContourParams = None):
	"""Memoised :func:`melnikov_planar`, so sweeps shared between tests are integrated once."""
	params = params or ContourParams()
	key = (e, mu, theta2, params)
	if key not in _planar_results:
		_planar_results[key] = melnikov_planar(e, mu, 1.0, theta2, params)
	return _planar_results[key]


THETA_GRID = [k*math.pi/8 for k in range(8)]

"""
The circular restricted three-body problem near a resonant Kepler torus.

Both the planar and the spatial problem are expressed as :class:`~MelnikovCert.melnikov.GenericSystem`
subclasses with the order-5 coefficients of the perturbation. At real angles the
radial angle is taken to be the mean anomaly of the osculating ellipse, which makes the
coefficients :math:`2\\pi`-periodic. Along complex paths the same coefficients are
evaluated from the continued true anomaly.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .contour import ContinuedPhi, ContourPath, PathFunction, continue_phi
from .delaunay import DomainError, PlanarState, SpatialState, h_bracket, h_hat1_from_state, spatial_state, state_from_anomaly
from .kepler_core import KeplerOrbit, resonant_I2, true_anomaly_of_mean
from .melnikov import GenericSystem

ORDER = 5


def resonant_actions(e: float, mu: float, I1star: float = 1.0, spatial: bool = False) -> np.ndarray:
	"""Actions :math:`(I_1^\\ast, I_2^\\ast)`, or :math:`(I_1^\\ast, I_2^\\ast, I_2^\\ast)` on the equatorial family."""
	I2 = resonant_I2(e, mu, I1star)
	return np.array([I1star, I2, I2] if spatial else [I1star, I2])


def orbit_of(I, mu: float) -> KeplerOrbit:
	"""The ellipse of the torus, inverting :func:`~MelnikovCert.kepler_core.resonant_I2`."""
	I1, I2 = float(I[0]), float(I[1])
	e = math.sqrt(max(1 - (I2/resonant_I2(0.0, mu, I1))**2, 0.0))
	return KeplerOrbit(mu, e, I2)


def _check_equatorial(I):
	if abs(I[1] - I[2]) > 1e-14*abs(I[1]):
		raise DomainError(f'Only the equatorial family I2 == I3 is supported: {I}')


def planar_terms(state: PlanarState, theta2, mu: float) -> np.ndarray:
	"""Order-5 action rates :math:`(\\mu h_1/2, h_2)` from a planar state."""
	u = theta2 - state.chi2
	return np.stack([mu/2*h_bracket(state, theta2), -1.5*mu*state.R**2*np.sin(2*u)])


def spatial_terms(state: SpatialState, theta3, mu: float) -> np.ndarray:
	u = theta3 - state.hat_chi3
	h3 = -1.5*mu*state.planar.R**2*np.sin(state.Psi)**2*np.sin(2*u)
	return np.stack([mu/2*h_hat1_from_state(state, theta3), h3, h3])


def planar_h5(I, theta, mu: float = 0.0) -> np.ndarray:
	theta = np.asarray(theta, dtype=float)
	orbit = orbit_of(I, mu)
	phi = true_anomaly_of_mean(theta[0], orbit.e)
	return planar_terms(state_from_anomaly(orbit, phi), theta[1], mu)


def spatial_h5(I, theta, mu: float = 0.0) -> np.ndarray:
	_check_equatorial(I)
	theta = np.asarray(theta, dtype=float)
	orbit = orbit_of(I, mu)
	phi = true_anomaly_of_mean(theta[0], orbit.e)
	return spatial_terms(spatial_state(orbit, phi, theta[1]), theta[2], mu)


def zero_g5(I, theta) -> np.ndarray:
	"""The angle perturbation does not enter the order-5 reduced equation."""
	return np.zeros(np.shape(theta))


def _omega(I, mu: float, m: int) -> np.ndarray:
	omega = np.zeros(m)
	omega[0] = (1 - mu)/float(I[0])**3
	return omega


def _d_omega(I, mu: float, m: int) -> np.ndarray:
	d_omega = np.zeros((m, m))
	d_omega[0, 0] = -3*(1 - mu)/float(I[0])**4
	return d_omega


class _AnomalyFlow(PathFunction):
	"""Coefficients along the flow through the continued true anomaly."""

	def __init__(self, phi: ContinuedPhi, terms, m: int):
		self.phi = phi
		self.terms = terms
		self.m = m

	def evaluate(self, index, s, t):
		h = self.terms(self.phi.at(index, s))
		return np.concatenate([h, np.zeros((self.m, h.shape[1]))]).T


@GenericSystem.register('crtbp-planar')
@dataclass(repr=False)
class PlanarCRTBP(GenericSystem):
	mu: float = 0.0

	@classmethod
	def build(cls, mu: float, **kwargs) -> PlanarCRTBP:
		return cls(
			name='crtbp-planar', ell=2, m=2,
			omega=partial(_omega, mu=mu, m=2),
			d_omega=partial(_d_omega, mu=mu, m=2),
			h_k=partial(planar_h5, mu=mu),
			g_k=zero_g5,
			k=ORDER,
			mu=mu,
		)

	def along(self, I_star, theta, path: ContourPath) -> PathFunction:
		log = logging.getLogger(f'{__name__}.PlanarCRTBP.along')
		orbit = orbit_of(I_star, self.mu)
		theta = np.asarray(theta, dtype=float)
		log.debug(f'Continuing {orbit} along {path} shifted by theta1={theta[0]}')
		phi = continue_phi(orbit, path.translated(theta[0]/orbit.omega1))
		return _AnomalyFlow(phi, lambda p: planar_terms(state_from_anomaly(orbit, p), theta[1], self.mu), self.m)


@GenericSystem.register('crtbp-spatial')
@dataclass(repr=False)
class SpatialCRTBP(GenericSystem):
	"""Equatorial family :math:`I_2 = I_3` of the spatial problem."""
	mu: float = 0.0

	@classmethod
	def build(cls, mu: float, **kwargs) -> SpatialCRTBP:
		return cls(
			name='crtbp-spatial', ell=3, m=3,
			omega=partial(_omega, mu=mu, m=3),
			d_omega=partial(_d_omega, mu=mu, m=3),
			h_k=partial(spatial_h5, mu=mu),
			g_k=zero_g5,
			k=ORDER,
			mu=mu,
		)

	def along(self, I_star, theta, path: ContourPath) -> PathFunction:
		_check_equatorial(I_star)
		orbit = orbit_of(I_star, self.mu)
		theta = np.asarray(theta, dtype=float)
		phi = continue_phi(orbit, path.translated(theta[0]/orbit.omega1))
		return _AnomalyFlow(phi, lambda p: spatial_terms(spatial_state(orbit, p, theta[1]), theta[2], self.mu), self.m)

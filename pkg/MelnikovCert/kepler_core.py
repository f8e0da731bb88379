"""
Scaled two-body kinematics in the rotating frame: the Kepler ellipse, its true-anomaly
time law, and the continuation of that law to complex time.

Angles and times may be complex throughout. The mean-anomaly map

.. math:: z(\\phi) = \\omega_1 t

is evaluated modulo :math:`2\\pi` when inverted, which makes the inversion insensitive to
the logarithmic branch cut that starts at the pole :math:`\\phi = \\pi + iK_2`.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from ._cache import memoize

NEWTON_TOL = 1e-12
NEWTON_MAXITER = 50
POLE_GUARD = 1e-10

TWO_PI = 2*math.pi


class PoleError(ArithmeticError):
	"""Raised when :math:`|1 + e\\cos\\phi|` falls below :data:`POLE_GUARD`."""


class BranchDomainError(ValueError):
	"""Raised when an anomaly lies outside the strip of the requested time-of-flight branch."""


class NewtonDivergence(ArithmeticError):
	"""Raised when a Newton iteration has not converged within its iteration budget."""


##########################################################################################


@dataclass(frozen=True)
class KeplerOrbit:
	"""
	Scaled Kepler ellipse :math:`r = p_\\phi^2/((1-\\mu)(1+e\\cos\\phi))`.
	"""
	mu: float
	"""Mass ratio."""
	e: float
	"""Eccentricity."""
	p_phi: float
	"""Angular momentum."""

	def __post_init__(self):
		if not 0 <= self.mu < 1:
			raise ValueError(f'Mass ratio must lie in [0, 1): {self.mu}')
		if not 0 <= self.e < 1:
			raise ValueError(f'Eccentricity must lie in [0, 1): {self.e}')
		if not self.p_phi > 0:
			raise ValueError(f'Angular momentum must be positive: {self.p_phi}')

	@classmethod
	def resonant(cls, e: float, mu: float, I1star: float = 1.0) -> KeplerOrbit:
		"""
		The orbit on the resonant torus, whose period equals :math:`2\\pi I_1^{\\ast 3}/(1-\\mu)`.

		:param e: Eccentricity.
		:param mu: Mass ratio.
		:param I1star: First action of the torus.
		"""
		return cls(mu, e, resonant_I2(e, mu, I1star))

	@property
	def period(self) -> float:
		return TWO_PI * self.p_phi**3 / ((1 - self.mu)**2 * (1 - self.e**2)**1.5)

	@property
	def omega1(self) -> float:
		"""Mean motion."""
		return (1 - self.mu)**2 * (1 - self.e**2)**1.5 / self.p_phi**3

	def __repr__(self) -> str:
		return f'<KeplerOrbit mu={self.mu} e={self.e} p_phi={self.p_phi}>'


def resonant_I2(e: float, mu: float, I1star: float = 1.0) -> float:
	return I1star * (1 - mu)**(1/3) * math.sqrt(1 - e**2)


@dataclass
class SingularityData:
	k1: float
	"""Imaginary phase at which the true anomaly escapes to infinity."""
	k2: float
	"""Imaginary height of the pole of :math:`1/(1+e\\cos\\phi)`."""
	singular_times: List[complex] = field(default_factory=list)


##########################################################################################


def _guard(orbit: KeplerOrbit, phi):
	denominator = 1 + orbit.e*np.cos(phi)
	if np.any(np.abs(denominator) < POLE_GUARD):
		raise PoleError(f'1 + e cos(phi) vanishes near phi={phi} (e={orbit.e})')
	return denominator


def radius_of_phi(orbit: KeplerOrbit, phi):
	"""
	Radius on the ellipse at (possibly complex) true anomaly ``phi``.

	:raises PoleError: near :math:`\\phi = \\pi \\pm iK_2`.
	"""
	return orbit.p_phi**2 / ((1 - orbit.mu) * _guard(orbit, phi))


def dphi_dt(orbit: KeplerOrbit, phi):
	"""Angular velocity :math:`\\omega_1(1+e\\cos\\phi)^2/(1-e^2)^{3/2}`."""
	return orbit.omega1 * (1 + orbit.e*np.cos(phi))**2 / (1 - orbit.e**2)**1.5


def dz_dphi(orbit: KeplerOrbit, phi):
	return (1 - orbit.e**2)**1.5 / _guard(orbit, phi)**2


def _principal(e: float, phi):
	s = math.sqrt(1 - e**2)
	k = (1 - e) / s
	return 2*np.arctan(k*np.tan(phi/2)) - e*s*np.sin(phi)/(1 + e*np.cos(phi))


def _shifted(e: float, phi):
	s = math.sqrt(1 - e**2)
	k = (1 - e) / s
	# arccot(x) is taken as arctan(1/x)
	return 2*np.arctan(np.tan((phi + math.pi)/2)/k) - e*s*np.sin(phi)/(1 + e*np.cos(phi)) + math.pi


def time_of_flight(orbit: KeplerOrbit, phi, branch: str = 'principal'):
	"""
	Time since perihelion passage at true anomaly ``phi``.

	:param branch: ``principal`` for :math:`|\\Re\\phi| < \\pi`, ``shifted`` for
	               :math:`0 < \\Re\\phi < 2\\pi`.
	:raises BranchDomainError: if ``phi`` is outside the strip of the chosen branch.
	"""
	re = np.real(phi)
	if branch == 'principal':
		if np.any(np.abs(re) >= math.pi):
			raise BranchDomainError(f'Principal branch needs |Re phi| < pi, got {phi}')
		z = _principal(orbit.e, phi)
	elif branch == 'shifted':
		if np.any((re <= 0) | (re >= TWO_PI)):
			raise BranchDomainError(f'Shifted branch needs 0 < Re phi < 2 pi, got {phi}')
		z = _shifted(orbit.e, phi)
	else:
		raise BranchDomainError(f'Unknown branch: {branch}')
	_guard(orbit, phi)
	return z / orbit.omega1


def mean_anomaly(orbit: KeplerOrbit, phi):
	"""
	:math:`\\omega_1 t` as a function of ``phi``, valid for any real part. The result is
	exact modulo :math:`2\\pi`, and exact outright on the real axis.
	"""
	phi = np.asarray(phi, dtype=complex)
	n = np.round(phi.real / TWO_PI)
	reduced = phi - TWO_PI*n
	negative = reduced.real < 0
	with np.errstate(all='ignore'):
		near = _principal(orbit.e, reduced)
		far = _shifted(orbit.e, np.where(negative, reduced + TWO_PI, reduced)) - np.where(negative, TWO_PI, 0)
	z = np.where(np.abs(reduced.real) <= math.pi/2, near, far)
	return (z + TWO_PI*n)[()]


def _wrap(r):
	return r - TWO_PI*np.round(np.real(r)/TWO_PI)


def newton_phi(orbit: KeplerOrbit, t, seed):
	"""
	Vectorised Newton solve of :math:`z(\\phi) \\equiv \\omega_1 t \\pmod{2\\pi}` from ``seed``.

	:raises NewtonDivergence: if any node fails to converge.
	:raises PoleError: if an iterate lands on a pole.
	"""
	log = logging.getLogger(f'{__name__}.newton_phi')
	target = orbit.omega1 * np.asarray(t, dtype=complex)
	phi = np.array(seed, dtype=complex, copy=True)
	for iteration in range(NEWTON_MAXITER):
		residual = _wrap(mean_anomaly(orbit, phi) - target)
		if np.all(np.abs(residual) < NEWTON_TOL):
			if iteration > 8:
				log.debug(f'Converged after {iteration} iterations')
			return phi[()]
		phi = phi - residual / dz_dphi(orbit, phi)
		if not np.all(np.isfinite(phi)):
			break
	raise NewtonDivergence(f'No convergence for t={t} from seed={seed}')


def eccentric_anomaly(M, e: float):
	"""
	Solve Kepler's equation :math:`E - e\\sin E = M` for real ``M``.

	The starter and iteration follow the usual Vallado scheme, applied to :math:`|M|`
	reduced to :math:`[0, \\pi]`.
	"""
	M = np.asarray(M, dtype=float)
	revolutions = np.round(M / TWO_PI)
	reduced = M - TWO_PI*revolutions
	sign = np.where(reduced < 0, -1.0, 1.0)
	m = np.abs(reduced)
	E = m / (1 - e)
	with np.errstate(all='ignore'):
		E = np.where(e*E**2 > 6*(1 - e), np.cbrt(6*m/max(e, 1e-300)), E)
	E = np.minimum(E, math.pi)
	for _ in range(200):
		delta = (E - e*np.sin(E) - m) / (1 - e*np.cos(E))
		E = E - delta
		if np.max(np.abs(delta), initial=0.0) < 4*np.finfo(float).eps:
			break
	else:
		raise NewtonDivergence(f'Kepler equation did not converge for e={e}')
	return sign*E + TWO_PI*revolutions


def true_anomaly_of_mean(M, e: float):
	"""Continuous (unwrapped) true anomaly for real mean anomaly ``M``."""
	E = eccentric_anomaly(M, e)
	revolutions = np.round(E / TWO_PI)
	reduced = E - TWO_PI*revolutions
	phi = 2*np.arctan2(math.sqrt(1 + e)*np.sin(reduced/2), math.sqrt(1 - e)*np.cos(reduced/2))
	return phi + TWO_PI*revolutions


def phi_of_time(orbit: KeplerOrbit, t, seed=None):
	"""
	True anomaly at time ``t``.

	Real times without a seed use the exact Kepler-equation solve. Complex times need a
	seed in the Newton basin, supplied by path continuation.
	"""
	if seed is None:
		if np.any(np.imag(t) != 0):
			raise ValueError('A seed is required for complex times')
		return true_anomaly_of_mean(orbit.omega1*np.real(t), orbit.e)
	return newton_phi(orbit, t, seed)


def pole_phi(e: float) -> complex:
	return complex(math.pi, k2(e))


##########################################################################################


def _check_e(e: float):
	if not 0 < e < 1:
		raise ValueError(f'Eccentricity must lie in (0, 1): {e}')


def k1(e: float) -> float:
	_check_e(e)
	s = math.sqrt(1 - e**2)
	return 2*math.atanh((1 - e)/s) - s


def k2(e: float) -> float:
	_check_e(e)
	return math.acosh(1/e)


def singular_times(orbit: KeplerOrbit, Tstar: float) -> List[complex]:
	"""Singular times :math:`nT^\\ast/3 + iK_1/\\omega_1` in one period cell, ``n = 0, 1, 2``."""
	height = k1(orbit.e) / orbit.omega1
	return [complex(n*Tstar/3, height) for n in range(3)]


@memoize(maxsize=256)
def singularity_data(orbit: KeplerOrbit, Tstar: float) -> SingularityData:
	return SingularityData(k1(orbit.e), k2(orbit.e), singular_times(orbit, Tstar))


def k1_asymptote_check(orbit: KeplerOrbit, im_phi: float) -> complex:
	""":math:`\\omega_1 t` at :math:`\\phi = i\\,\\mathrm{im\\_phi}` on the principal branch."""
	return orbit.omega1 * time_of_flight(orbit, complex(0, im_phi), 'principal')


def _check_branches():
	orbit = KeplerOrbit(0.0, 0.5, 1.0)
	for phi in (0.3, 1.5, 2.9):
		a = time_of_flight(orbit, phi, 'principal')
		b = time_of_flight(orbit, phi, 'shifted')
		if abs(a - b) > 1e-12:
			raise BranchDomainError(f'Branches disagree at phi={phi}: {a} != {b}')


_check_branches()

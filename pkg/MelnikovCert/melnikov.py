"""
Melnikov-type loop integrals for resonant tori, in general and for the restricted
three-body problem.

For the CRTBP the integral at the resonant torus is written three ways:

- the raw form in the Delaunay quantities :math:`R`, :math:`\\chi_2`,
- the anomaly form weighted by :math:`\\dot\\phi`,
- the simplified form in :math:`\\phi` alone,

all evaluated along the same continued anomaly so they can be compared node by node.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from ._cache import memoize
from .contour import (AnomalyFunction, ContinuedPhi, ContourPath, PathFunction, build_circle, build_gamma,
                      continue_phi, integrate, integrate_segments)
from .delaunay import h_bracket, h_hat1_from_state, spatial_state, state_from_radius
from .kepler_core import KeplerOrbit, dphi_dt, k1, k2, radius_of_phi

MARGIN = 10.0
ERROR_FLOOR = 64*np.finfo(float).eps
TOP_SEGMENT = 4


@dataclass(frozen=True)
class ContourParams:
	"""Shape of :math:`\\gamma_\\theta` in units of the singular height :math:`k = K_1/\\omega_1`."""
	delta_factor: float = 0.05
	bigm_factor: float = 10.0
	side: str = 'left'
	tol: float = 1e-10

	def heights(self, orbit: KeplerOrbit) -> Tuple[float, float, float]:
		k = k1(orbit.e)/orbit.omega1
		return k, self.delta_factor*k, self.bigm_factor*k

	def to_gamma(self, orbit: KeplerOrbit) -> ContourPath:
		"""The loop on the cylinder whose cell holds three orbital periods."""
		k, delta, M = self.heights(orbit)
		return build_gamma(3*orbit.period, k, delta, M, self.side)


@dataclass
class MelnikovResult:
	value: np.ndarray
	"""Complex vector, one entry per action."""
	theta: Tuple[float, ...]
	contour: Optional[ContourPath]
	error_estimate: float
	params: Dict = field(default_factory=dict)

	@property
	def magnitude(self) -> float:
		return float(np.max(np.abs(self.value), initial=0.0))

	@property
	def margin(self) -> float:
		"""Magnitude over the error estimate, which is floored at a few ulps of the magnitude."""
		if self.magnitude == 0:
			return 0.0
		return self.magnitude/error_floor(self.error_estimate, self.magnitude)

	@property
	def nonzero_verdict(self) -> bool:
		return self.margin > MARGIN

	def __repr__(self) -> str:
		return f'<MelnikovResult theta={self.theta} value={self.value} margin={self.margin:.3g}>'


def error_floor(error: float, magnitude: float) -> float:
	return max(error, ERROR_FLOOR*magnitude)


##########################################################################################


@dataclass
class GenericSystem:
	"""
	Nearly integrable system :math:`\\dot I = \\varepsilon h`, :math:`\\dot\\theta = \\omega(I) + \\varepsilon g`
	with ``ell`` actions and ``m`` angles, reduced to its order-``k`` coefficients.

	``h_k(I, theta)`` and ``g_k(I, theta)`` take angles of shape ``(m, n)`` and return arrays
	of shape ``(ell, n)`` and ``(m, n)``. They include the :math:`1/k!`.
	"""
	log = logging.getLogger(f'{__name__}.GenericSystem')
	_subclasses = dict()

	name: str
	ell: int
	m: int
	omega: Callable[[np.ndarray], np.ndarray]
	d_omega: Callable[[np.ndarray], np.ndarray]
	h_k: Callable[[np.ndarray, np.ndarray], np.ndarray]
	g_k: Callable[[np.ndarray, np.ndarray], np.ndarray]
	k: int = 0

	@staticmethod
	def register(name: str):
		"""
		Decorator which registers a :class:`GenericSystem` subclass under ``name``. Subclasses
		provide a ``build(**params)`` classmethod.
		"""
		def wrapper(cls):
			GenericSystem._subclasses[name] = cls
			return cls
		return wrapper

	@staticmethod
	def for_type(name: str):
		GenericSystem.log.debug(f'_subclasses: {GenericSystem._subclasses}')
		if name not in GenericSystem._subclasses:
			raise NameError(f'Unknown system: {name}')
		return GenericSystem._subclasses[name]

	def check_periodicity(self, I, samples: int = 4, seed: int = 0, rtol: float = 1e-8):
		"""
		Spot check that ``h_k`` and ``g_k`` are :math:`2\\pi`-periodic in every angle.

		:raises ValueError: on the first mismatch.
		"""
		rng = np.random.default_rng(seed)
		theta = rng.uniform(0, 2*math.pi, size=(self.m, samples))
		base_h, base_g = self.h_k(I, theta), self.g_k(I, theta)
		scale = max(1.0, float(np.max(np.abs(base_h), initial=0.0)), float(np.max(np.abs(base_g), initial=0.0)))
		for j in range(self.m):
			shifted = theta.copy()
			shifted[j] += 2*math.pi
			if not (np.allclose(self.h_k(I, shifted), base_h, rtol=0, atol=rtol*scale) and np.allclose(self.g_k(I, shifted), base_g, rtol=0, atol=rtol*scale)):
				raise ValueError(f'{self.name}: coefficients are not 2 pi-periodic in angle {j}')
		self.log.debug(f'{self.name}: periodicity spot check passed on {samples} samples')

	def along(self, I_star, theta, path: ContourPath) -> PathFunction:
		"""
		Integrand stacking :math:`h_k` and :math:`g_k` along the flow
		:math:`\\theta(t) = \\omega(I^\\ast)t + \\theta`, as an array of shape ``(n, ell + m)``.
		"""
		return _FlowFunction(self, np.asarray(I_star, dtype=float), np.asarray(theta, dtype=float))

	def __repr__(self) -> str:
		return f'<{self.__class__.__name__} {self.name} ell={self.ell} m={self.m} k={self.k}>'


class _FlowFunction(PathFunction):
	def __init__(self, system: GenericSystem, I_star: np.ndarray, theta: np.ndarray):
		self.system = system
		self.I_star = I_star
		self.theta = theta
		self.omega = np.asarray(system.omega(I_star), dtype=float)

	def evaluate(self, index, s, t):
		angles = self.omega[:, None]*np.asarray(t)[None, :] + self.theta[:, None]
		h = np.asarray(self.system.h_k(self.I_star, angles), dtype=complex).reshape(self.system.ell, -1)
		g = np.asarray(self.system.g_k(self.I_star, angles), dtype=complex).reshape(self.system.m, -1)
		return np.concatenate([h, g]).T


def melnikov_generic(system: GenericSystem, res, theta, path: ContourPath, tol: float = 1e-10) -> MelnikovResult:
	"""
	:math:`D\\omega(I^\\ast)\\oint_\\gamma h_k(I^\\ast, \\omega(I^\\ast)\\tau + \\theta)\\,d\\tau`.

	:param res: :class:`~MelnikovCert.variational.ResonanceData` of the torus.
	"""
	result = integrate(path, system.along(res.I_star, theta, path), tol)
	C1 = np.asarray(result.value)[:system.ell]
	d_omega = np.asarray(res.d_omega, dtype=float)
	return MelnikovResult(
		value=d_omega @ C1,
		theta=tuple(float(x) for x in np.ravel(theta)),
		contour=path,
		error_estimate=float(np.linalg.norm(d_omega, 2))*result.error_estimate,
		params={'system': system.name, 'k': system.k},
	)


##########################################################################################


def prefactor(e: float, mu: float, I1star: float = 1.0) -> float:
	""":math:`9\\mu I_2^\\ast/(2I_1^\\ast)` on the resonant torus."""
	return 9*mu*KeplerOrbit.resonant(e, mu, I1star).p_phi/(2*I1star)


def simplified_integrand(e: float, theta2: float):
	def f(phi, t):
		return np.sin(2*(phi + theta2)) - e*np.sin(phi)*(np.cos(2*(phi + theta2)) + 1/3)/(1 + e*np.cos(phi))
	return f


def anomaly_integrand(orbit: KeplerOrbit, I1star: float, theta2: float, sign: int = -1):
	e, mu = orbit.e, orbit.mu
	scale = 3*mu*orbit.p_phi**4/(2*(1 - mu)**2*I1star)

	def f(phi, t):
		denominator = 1 + e*np.cos(phi)
		return scale*dphi_dt(orbit, phi)*(
			3*np.sin(2*(phi + theta2))/denominator**2
			+ sign*e*np.sin(phi)*(3*np.cos(2*(phi + theta2)) + 1)/denominator**3
		)
	return f


def raw_integrand(orbit: KeplerOrbit, I1star: float, theta2: float):
	weight = -3*(1 - orbit.mu)/I1star**4*orbit.mu/2

	def f(phi, t):
		return weight*h_bracket(state_from_radius(orbit, radius_of_phi(orbit, phi), phi), theta2)
	return f


def spatial_integrand(orbit: KeplerOrbit, I1star: float, theta3: float):
	weight = -3*(1 - orbit.mu)/I1star**4*orbit.mu/2

	def f(phi, t):
		return weight*h_hat1_from_state(spatial_state(orbit, phi), theta3)
	return f


@memoize(maxsize=32)
def continued_gamma(orbit: KeplerOrbit, params: ContourParams) -> ContinuedPhi:
	return continue_phi(orbit, params.to_gamma(orbit))


def _evaluate(orbit: KeplerOrbit, integrand, scale: float, theta, params: ContourParams, form: str) -> MelnikovResult:
	log = logging.getLogger(f'{__name__}._evaluate')
	phi = continued_gamma(orbit, params)
	result = integrate(phi.path, AnomalyFunction(phi, integrand), params.tol)
	log.debug(f'{form} at theta={theta}: {result}')
	return MelnikovResult(
		value=np.atleast_1d(scale*result.value).astype(complex),
		theta=tuple(theta),
		contour=phi.path,
		error_estimate=abs(scale)*result.error_estimate,
		params={'e': orbit.e, 'mu': orbit.mu, 'form': form},
	)


def melnikov_planar(e: float, mu: float, I1star: float = 1.0, theta2: float = 0.0, contour_params: ContourParams = None) -> MelnikovResult:
	"""
	The planar integral in its simplified form,

	.. math:: \\frac{9\\mu I_2^\\ast}{2I_1^\\ast}\\oint \\sin 2(\\phi+\\theta_2) - \\frac{e\\sin\\phi\\,(\\cos 2(\\phi+\\theta_2) + 1/3)}{1 + e\\cos\\phi}\\,dt.
	"""
	orbit = KeplerOrbit.resonant(e, mu, I1star)
	return _evaluate(orbit, simplified_integrand(e, theta2), prefactor(e, mu, I1star), (theta2,), contour_params or ContourParams(), 'simplified')


def melnikov_planar_raw(e: float, mu: float, I1star: float = 1.0, theta2: float = 0.0, contour_params: ContourParams = None) -> MelnikovResult:
	"""The planar integral as :math:`D\\omega` times the loop integral of :math:`\\mu h_1/2` in :math:`R, \\chi_2`."""
	orbit = KeplerOrbit.resonant(e, mu, I1star)
	return _evaluate(orbit, raw_integrand(orbit, I1star, theta2), 1.0, (theta2,), contour_params or ContourParams(), 'raw')


def melnikov_anomaly_form(e: float, mu: float, I1star: float = 1.0, theta2: float = 0.0, contour_params: ContourParams = None, sign: int = -1) -> MelnikovResult:
	orbit = KeplerOrbit.resonant(e, mu, I1star)
	return _evaluate(orbit, anomaly_integrand(orbit, I1star, theta2, sign), 1.0, (theta2,), contour_params or ContourParams(), f'anomaly{sign:+d}')


def melnikov_spatial(e: float, mu: float, I1star: float = 1.0, theta3: float = 0.0, contour_params: ContourParams = None) -> MelnikovResult:
	"""
	The spatial integral on the equatorial family :math:`I_2 = I_3 = I_2^\\ast` at
	:math:`\\theta_1 = \\theta_2 = 0`.
	"""
	orbit = KeplerOrbit.resonant(e, mu, I1star)
	return _evaluate(orbit, spatial_integrand(orbit, I1star, theta3), 1.0, (theta3,), contour_params or ContourParams(), 'spatial')


@dataclass
class SignReport:
	simplified: complex
	minus: complex
	plus: complex

	@property
	def consistent_sign(self) -> Optional[int]:
		"""The sign whose anomaly form reproduces the simplified form, or ``None``."""
		scale = max(abs(self.simplified), 1e-300)
		distances = {-1: abs(self.minus - self.simplified)/scale, +1: abs(self.plus - self.simplified)/scale}
		best = min(distances, key=distances.get)
		return best if distances[best] < 1e-6 else None


def sign_consistency(e: float, mu: float, I1star: float = 1.0, theta2: float = 0.0, contour_params: ContourParams = None) -> SignReport:
	log = logging.getLogger(f'{__name__}.sign_consistency')
	report = SignReport(
		simplified=complex(melnikov_planar(e, mu, I1star, theta2, contour_params).value[0]),
		minus=complex(melnikov_anomaly_form(e, mu, I1star, theta2, contour_params, -1).value[0]),
		plus=complex(melnikov_anomaly_form(e, mu, I1star, theta2, contour_params, +1).value[0]),
	)
	log.info(f'e={e} mu={mu} theta2={theta2}: consistent sign is {report.consistent_sign}')
	return report


##########################################################################################


def top_segment_leading(e: float, theta2: float, M: float, orbit: KeplerOrbit = None) -> complex:
	"""
	Growth of the top-segment integral of
	:math:`\\sin\\phi(\\cos 2(\\phi+\\theta_2)+1/3)/(1+e\\cos\\phi)` at height ``M``. The
	linear term is

	.. math:: L = M\\frac{2\\pi}{e^3}\\left(\\frac{2-e^2}{\\sqrt{1-e^2}}i\\cos 2\\theta_2 + 2\\sin 2\\theta_2 + \\frac{ie^2}{3\\sqrt{1-e^2}}\\right)

	Given the ``orbit``, the logarithmic term :math:`-L\\log(\\omega_1 M)/(\\omega_1 M)`
	that comes with it is added, and the rest of the integral stays bounded in ``M``.
	"""
	s = math.sqrt(1 - e**2)
	linear = M*2*math.pi/e**3*((2 - e**2)/s*1j*math.cos(2*theta2) + 2*math.sin(2*theta2) + 1j*e**2/(3*s))
	if orbit is None:
		return linear
	z = orbit.omega1*M
	return linear - linear*math.log(z)/z


@dataclass(frozen=True)
class PoleExpansion:
	"""
	The top-segment integrand near the pole :math:`\\phi_p = \\pi \\pm iK_2` that the anomaly
	approaches high above the real axis. In :math:`\\zeta = \\omega_1 t - c` the anomaly
	satisfies :math:`\\omega_1 t = s/w + \\beta\\log w + c + O(w)` with :math:`w = \\phi - \\phi_p`
	and :math:`s = \\sqrt{1-e^2}`, and the integrand is

	.. math:: A\\zeta - A\\beta\\log(s/\\zeta) + K - A\\beta^2\\frac{\\log(s/\\zeta)}{\\zeta} + O(1/\\zeta)
	"""
	A: complex
	beta: complex
	K: complex
	c: complex
	s: float

	@classmethod
	def near(cls, orbit: KeplerOrbit, theta2: float, t: complex, phi: complex) -> PoleExpansion:
		"""
		Expansion about the pole nearest the continued anomaly ``phi`` at time ``t``. The
		sheet constant ``c`` is known up to a multiple of :math:`2\\pi`, which ``(t, phi)`` fixes.
		"""
		e = orbit.e
		s = math.sqrt(1 - e**2)
		pole = complex(math.pi*(2*round((phi.real - math.pi)/(2*math.pi)) + 1), math.copysign(k2(e), phi.imag))
		sigma = -e*cmath.sin(pole)
		beta = -s**3/sigma**3
		wave = cmath.cos(2*(pole + theta2)) + 1/3
		N = cmath.sin(pole)*wave
		dN = cmath.cos(pole)*wave - 2*cmath.sin(pole)*cmath.sin(2*(pole + theta2))
		c = 1.5*math.pi + beta*(0.5 + math.log(e/(2*s)))
		w = phi - pole
		offset = orbit.omega1*t - s/w - beta*cmath.log(w) - c
		return cls(N/(sigma*s), beta, dN/sigma - N/(2*sigma**2), c + 2*math.pi*round(offset.real/(2*math.pi)), s)

	def antiderivative(self, zeta: complex) -> complex:
		log = cmath.log(self.s/zeta)
		return self.A*zeta**2/2 + self.K*zeta - self.A*self.beta*(zeta*log + zeta) + self.A*self.beta**2*log**2/2

	def integral(self, orbit: KeplerOrbit, start: complex, end: complex) -> complex:
		"""Time integral of the expansion from ``start`` to ``end``."""
		return (self.antiderivative(orbit.omega1*end - self.c) - self.antiderivative(orbit.omega1*start - self.c))/orbit.omega1


def _top_segment(e: float, mu: float, I1star: float, M: float, contour_params: ContourParams) -> Tuple[ContinuedPhi, ContourParams]:
	params = contour_params or ContourParams()
	orbit = KeplerOrbit.resonant(e, mu, I1star)
	if M is not None:
		k = k1(e)/orbit.omega1
		params = ContourParams(params.delta_factor, M/k, params.side, params.tol)
	return continued_gamma(orbit, params).restricted(TOP_SEGMENT), params


def top_segment_numeric(e: float, mu: float, I1star: float = 1.0, theta2: float = 0.0, M: float = None, contour_params: ContourParams = None) -> complex:
	"""
	Integral of the same function along the top of :math:`\\gamma_\\theta`, from
	:math:`2T + iM` to :math:`T + iM`. ``M`` is in time units.
	"""
	top, params = _top_segment(e, mu, I1star, M, contour_params)

	def f(phi, t):
		return np.sin(phi)*(np.cos(2*(phi + theta2)) + 1/3)/(1 + e*np.cos(phi))
	return complex(integrate(top.path, AnomalyFunction(top, f), params.tol).value)


def top_segment_asymptotic(e: float, mu: float, I1star: float = 1.0, theta2: float = 0.0, M: float = None, contour_params: ContourParams = None) -> complex:
	"""
	:func:`top_segment_numeric` from the :class:`PoleExpansion` at the middle of the top
	segment, including its bounded part. The two differ by :math:`O(1/M)`.
	"""
	top, _ = _top_segment(e, mu, I1star, M, contour_params)
	segment = top.path.segments[0]
	expansion = PoleExpansion.near(top.orbit, theta2, complex(segment.point(0.5)), complex(top.at(0, np.array([0.5]))[0]))
	return expansion.integral(top.orbit, segment.start, segment.end)


def vertical_legs(e: float, mu: float, I1star: float = 1.0, theta2: float = 0.0, contour_params: ContourParams = None) -> Tuple[complex, complex]:
	"""Contributions of the two vertical legs (arcs included) to the simplified integral."""
	params = contour_params or ContourParams()
	orbit = KeplerOrbit.resonant(e, mu, I1star)
	phi = continued_gamma(orbit, params)
	parts = integrate_segments(phi.path, AnomalyFunction(phi, simplified_integrand(e, theta2)), params.tol)
	scale = prefactor(e, mu, I1star)
	rising = sum(r.value for r in parts[1:4])
	falling = sum(r.value for r in parts[5:8])
	return scale*rising, scale*falling


def small_circle(e: float, mu: float, I1star: float = 1.0, theta2: float = 0.0, delta: float = None, turns: int = 2, tol: float = 1e-10) -> MelnikovResult:
	"""
	The simplified integral around a circle of radius ``delta`` about the singular time
	:math:`T + iK_1/\\omega_1`. Two turns return the anomaly to its starting sheet.
	"""
	orbit = KeplerOrbit.resonant(e, mu, I1star)
	k = k1(e)/orbit.omega1
	delta = delta or 1e-3*k
	path = build_circle(complex(orbit.period, k), delta, turns)
	phi = continue_phi(orbit, path)
	result = integrate(path, AnomalyFunction(phi, simplified_integrand(e, theta2)), tol)
	scale = prefactor(e, mu, I1star)
	return MelnikovResult(
		value=np.atleast_1d(scale*result.value).astype(complex),
		theta=(theta2,),
		contour=path,
		error_estimate=abs(scale)*result.error_estimate,
		params={'e': e, 'mu': mu, 'form': 'small-circle', 'turns': turns},
	)

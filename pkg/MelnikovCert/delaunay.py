"""
Delaunay generating functions of the planar and spatial Kepler problem.

The planar radial function :math:`\\chi(r, I_1, I_2)` is evaluated in closed form on the
outgoing sheet (:math:`r` increasing from :math:`r_-` to :math:`r_+`) and reflected onto
the incoming sheet. With the scaling used here the radial angle :math:`\\theta_1` has
period :math:`\\Theta = 2\\pi\\sqrt{1-\\mu}`; see :func:`radial_period`.

Along complex paths the Delaunay quantities are continued with the true anomaly, either
directly from the ellipse (:func:`state_from_anomaly`) or by evaluating the closed forms at
the continued radius (:func:`state_from_radius`).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .kepler_core import KeplerOrbit, NewtonDivergence, TWO_PI, _guard, dphi_dt, eccentric_anomaly, mean_anomaly, radius_of_phi

RADIUS_TOL = 1e-12
CIRCULAR_E = 1e-6


class DomainError(ValueError):
	"""Raised for radii or colatitudes outside the libration interval, or inadmissible actions."""


##########################################################################################


@dataclass(frozen=True)
class TurningPoints:
	r_minus: float
	r_plus: float

	def __repr__(self) -> str:
		return f'<TurningPoints {self.r_minus:.6g} .. {self.r_plus:.6g}>'


@dataclass(frozen=True)
class DelaunayActions:
	I1: float
	I2: float
	I3: float = None
	"""Third action, spatial problem only."""
	mu: float = 0.0

	def __post_init__(self):
		if self.I1 <= 0:
			raise DomainError(f'I1 must be positive: {self.I1}')
		if self.I1**2 < self.I2**2/(1 - self.mu) * (1 - RADIUS_TOL):
			raise DomainError(f'No real turning points for I1={self.I1}, I2={self.I2}, mu={self.mu}')
		if self.I3 is not None and abs(self.I3) > abs(self.I2):
			raise DomainError(f'|I3| must not exceed |I2|: {self.I3} > {self.I2}')

	@property
	def equatorial(self) -> bool:
		return self.I3 is not None and abs(self.I2 - self.I3) <= 1e-14*abs(self.I2)

	@property
	def turning_points(self) -> TurningPoints:
		return turning_points(self.I1, self.I2, self.mu)

	@property
	def eccentricity(self) -> float:
		return eccentricity(self.I1, self.I2, self.mu)


def turning_points(I1: float, I2: float, mu: float = 0.0) -> TurningPoints:
	root = math.sqrt(max(I1**2 - I2**2/(1 - mu), 0.0))
	return TurningPoints(I1*(I1 - root), I1*(I1 + root))


def eccentricity(I1: float, I2: float, mu: float = 0.0) -> float:
	"""Eccentricity of the ellipse traced by the actions."""
	return math.sqrt(max(1 - I2**2/((1 - mu)*I1**2), 0.0))


def radial_period(mu: float = 0.0) -> float:
	""":math:`\\chi_1` advances by :math:`2\\pi\\sqrt{1-\\mu}` per radial oscillation."""
	return TWO_PI*math.sqrt(1 - mu)


def radial_sheet(theta1, mu: float = 0.0):
	"""``+1`` while the radius increases (first half of the radial period), else ``-1``."""
	period = radial_period(mu)
	return np.where(np.mod(theta1, period) <= period/2, 1, -1)


##########################################################################################


def _check_radius(r, tp: TurningPoints):
	if np.iscomplexobj(r):
		# continued radii leave the libration interval
		return np.asarray(r)
	r = np.asarray(r, dtype=float)
	slack = RADIUS_TOL*tp.r_plus
	if np.any(r < tp.r_minus - slack) or np.any(r > tp.r_plus + slack):
		raise DomainError(f'Radius outside [{tp.r_minus}, {tp.r_plus}]: {r}')
	return np.clip(r, tp.r_minus, tp.r_plus)


def _S(r, tp: TurningPoints):
	product = (tp.r_plus - r)*(r - tp.r_minus)
	if np.iscomplexobj(product):
		return np.sqrt(product)
	return np.sqrt(np.maximum(product, 0.0))


def chi_integrand(r, I1: float, I2: float, mu: float = 0.0):
	"""Radial momentum :math:`(2(1-\\mu)/r - (1-\\mu)/I_1^2 - I_2^2/r^2)^{1/2}`."""
	tp = turning_points(I1, I2, mu)
	r = _check_radius(r, tp)
	return math.sqrt(1 - mu)*_S(r, tp)/(I1*r)


def chi(r, I1: float, I2: float, mu: float = 0.0, sheet=1):
	"""
	Closed form of :math:`\\int_{r_-}^r p_r\\,d\\rho`, so that ``chi(r_minus) == 0`` and
	``chi(r_plus)`` is half the radial action integral. On sheet ``-1`` the value continues
	past :math:`r_+` back down to :math:`r_-`.
	"""
	tp = turning_points(I1, I2, mu)
	r = _check_radius(r, tp)
	width = tp.r_plus - tp.r_minus
	half = math.pi*(I1*math.sqrt(1 - mu) - I2)
	if width <= 0:
		return np.zeros_like(r)[()]
	closed = (
		-2*I1**2*np.arcsin(np.sqrt(np.clip((tp.r_plus - r)/width, 0.0, 1.0)))
		+ _S(r, tp)
		+ 2*I1*I2/math.sqrt(1 - mu)*np.arctan2(np.sqrt(tp.r_minus*(tp.r_plus - r)), np.sqrt(tp.r_plus*(r - tp.r_minus)))
	)
	outgoing = math.sqrt(1 - mu)/I1*closed + half
	return np.where(np.asarray(sheet) > 0, outgoing, 2*half - outgoing)[()]


def chi1(r, I1: float, I2: float, mu: float = 0.0, sheet=1):
	""":math:`\\partial\\chi/\\partial I_1`, the radial angle :math:`\\sqrt{1-\\mu}(E - e\\sin E)`."""
	tp = turning_points(I1, I2, mu)
	r = _check_radius(r, tp)
	width = tp.r_plus - tp.r_minus
	if width <= 0:
		return np.zeros_like(r)[()]
	E = np.arccos(np.clip((tp.r_plus + tp.r_minus - 2*r)/width, -1.0, 1.0))
	outgoing = math.sqrt(1 - mu)*(E - _S(r, tp)/I1**2)
	return np.where(np.asarray(sheet) > 0, outgoing, radial_period(mu) - outgoing)[()]


def chi2(r, I1: float, I2: float, mu: float = 0.0, sheet=1):
	"""
	:math:`\\partial\\chi/\\partial I_2`, minus the true anomaly measured from pericentre.
	For complex ``r`` this is the principal arccosine; the caller picks the branch.
	"""
	tp = turning_points(I1, I2, mu)
	r = _check_radius(r, tp)
	e = eccentricity(I1, I2, mu)
	if e < CIRCULAR_E:
		raise DomainError(f'The anomaly is undefined on a circular orbit (e={e})')
	x = (I2**2/((1 - mu)*r) - 1)/e
	if not np.iscomplexobj(x):
		x = np.clip(x, -1.0, 1.0)
	outgoing = -np.arccos(x)
	return np.where(np.asarray(sheet) > 0, outgoing, -TWO_PI - outgoing)[()]


def dchi2_dr(r, I1: float, I2: float, mu: float = 0.0, sheet=1):
	tp = turning_points(I1, I2, mu)
	r = _check_radius(r, tp)
	with np.errstate(divide='ignore'):
		return np.asarray(sheet)*(-I2*I1/(math.sqrt(1 - mu)*r*_S(r, tp)))


def dR_dtheta1(r, I1: float, I2: float, mu: float = 0.0, sheet=1):
	return np.asarray(sheet)*I1**3*chi_integrand(r, I1, I2, mu)/(1 - mu)


def solve_R(theta1, I1: float, I2: float, mu: float = 0.0):
	"""
	The radius :math:`R(\\theta_1)` with :math:`\\chi_1(R) = \\theta_1` modulo the radial period.

	Kepler's equation in the eccentric anomaly is solved by Newton; any failure falls back
	to bisection on the same equation.
	"""
	log = logging.getLogger(f'{__name__}.solve_R')
	theta1 = np.asarray(theta1, dtype=float)
	e = eccentricity(I1, I2, mu)
	if e < CIRCULAR_E:
		return np.full_like(theta1, I1**2)[()]
	M = theta1/math.sqrt(1 - mu)
	try:
		E = eccentric_anomaly(M, e)
	except NewtonDivergence:
		log.warning(f'Newton failed for e={e}, falling back to bisection')
		reduced = np.mod(M, TWO_PI)
		E = np.array([brentq(lambda x, m=m: x - e*math.sin(x) - m, 0.0, TWO_PI) for m in np.ravel(reduced)]).reshape(reduced.shape)
	return (I1**2*(1 - e*np.cos(E)))[()]


##########################################################################################


def psi0(I2: float, I3: float) -> float:
	return math.asin(I3/I2)


def _Q(psi, I2: float, I3: float):
	q2 = I2**2*np.sin(psi)**2 - I3**2
	if np.any(q2 < -RADIUS_TOL*I2**2):
		raise DomainError(f'I2^2 sin^2(psi) < I3^2 at psi={psi}')
	return np.sqrt(np.maximum(q2, 0.0))


def _c(I2: float, I3: float) -> float:
	c = math.sqrt(max(I2**2 - I3**2, 0.0))
	if c == 0:
		raise DomainError('The colatitude angles degenerate on the equator (I2 == I3)')
	return c


def hat_chi(psi, I2: float, I3: float):
	"""Closed form of :math:`\\int_{\\psi_0}^\\psi (I_2^2 - I_3^2/\\sin^2 s)^{1/2} ds`."""
	Q = _Q(psi, I2, I3)
	cos = np.cos(psi)
	return (I2*np.arctan2(Q, I2*cos) - I3*np.arctan2(Q, I3*cos))[()]


def hat_chi2(psi, I2: float, I3: float, sheet=1):
	_Q(psi, I2, I3)
	outgoing = np.arccos(np.clip(I2*np.cos(psi)/_c(I2, I3), -1.0, 1.0))
	return np.where(np.asarray(sheet) > 0, outgoing, TWO_PI - outgoing)[()]


def hat_chi3(psi, I2: float, I3: float, sheet=1):
	_Q(psi, I2, I3)
	outgoing = -np.arccos(np.clip(I3/np.tan(psi)/_c(I2, I3), -1.0, 1.0))
	return np.where(np.asarray(sheet) > 0, outgoing, -TWO_PI - outgoing)[()]


def dhat_chi2_dpsi(psi, I2: float, I3: float, sheet=1):
	return np.asarray(sheet)*I2*np.sin(psi)/_Q(psi, I2, I3)


def dhat_chi3_dpsi(psi, I2: float, I3: float, sheet=1):
	return np.asarray(sheet)*(-I3/(np.sin(psi)*_Q(psi, I2, I3)))


def solve_Psi(theta1, theta2, I1: float, I2: float, I3: float, mu: float = 0.0):
	"""
	Colatitude :math:`\\Psi` solving :math:`\\hat\\chi_2(\\Psi) + \\chi_2(R(\\theta_1)) = \\theta_2`.

	Returns ``pi/2`` identically on the equatorial family, where ``theta1`` may also be complex.

	:raises DomainError: for complex ``theta1`` off the equator.
	"""
	theta1 = np.asarray(theta1)
	if abs(I2 - I3) <= 1e-14*abs(I2):
		return np.full(theta1.shape, math.pi/2)[()]
	if np.iscomplexobj(theta1):
		raise DomainError('Off the equator the colatitude is only solved at real angles')
	theta1 = theta1.astype(float)
	target = _colatitude_phase(theta1, theta2, I1, I2, mu)
	c = _c(I2, I3)
	psi = np.arccos(np.clip(c*np.cos(target)/I2, -1.0, 1.0))
	for _ in range(50):
		residual = I2*np.cos(psi) - c*np.cos(target)
		if np.all(np.abs(residual) < 1e-12*I2):
			return psi[()]
		psi = psi + residual/(I2*np.sin(psi))
	raise NewtonDivergence(f'No colatitude found for theta1={theta1}, theta2={theta2}')


def _colatitude_phase(theta1, theta2, I1, I2, mu):
	R = solve_R(theta1, I1, I2, mu)
	return np.mod(theta2 - chi2(R, I1, I2, mu, radial_sheet(theta1, mu)), TWO_PI)


##########################################################################################


@dataclass
class PlanarState:
	"""Delaunay quantities along an orbit, at one or many instants."""
	R: np.ndarray
	dR_dtheta1: np.ndarray
	chi2: np.ndarray
	chi2_rate: np.ndarray
	""":math:`\\partial\\chi_2/\\partial r \\cdot \\partial R/\\partial\\theta_1`, finite at the turning points."""

	@property
	def dchi2_dr(self):
		with np.errstate(divide='ignore', invalid='ignore'):
			return self.chi2_rate/self.dR_dtheta1


@dataclass
class SpatialState:
	planar: PlanarState
	Psi: np.ndarray
	dPsi_dtheta1: np.ndarray
	hat_chi3: np.ndarray
	chi3_rate: np.ndarray
	""":math:`\\partial\\hat\\chi_3/\\partial\\psi \\cdot \\partial\\Psi/\\partial\\theta_1`."""


def planar_state(theta1, I1: float, I2: float, mu: float = 0.0) -> PlanarState:
	"""Real-angle state from :func:`solve_R` and the closed-form partials."""
	theta1 = np.asarray(theta1, dtype=float)
	R = solve_R(theta1, I1, I2, mu)
	sheet = radial_sheet(theta1, mu)
	revolutions = np.floor(theta1/radial_period(mu))
	return PlanarState(
		R=R,
		dR_dtheta1=dR_dtheta1(R, I1, I2, mu, sheet),
		chi2=chi2(R, I1, I2, mu, sheet) - TWO_PI*revolutions,
		chi2_rate=-I2*I1**3/((1 - mu)*R**2),
	)


def state_from_anomaly(orbit: KeplerOrbit, phi, omega1: float = None) -> PlanarState:
	"""
	State at a (possibly complex) true anomaly, from the ellipse and its angular velocity.

	:param omega1: Rate of the radial angle. Defaults to the mean motion of ``orbit``.
	"""
	omega1 = omega1 or orbit.omega1
	denominator = _guard(orbit, phi)
	phidot = dphi_dt(orbit, phi)
	scale = orbit.p_phi**2/(1 - orbit.mu)
	return PlanarState(
		R=scale/denominator,
		dR_dtheta1=orbit.e*scale*np.sin(phi)*phidot/(denominator**2*omega1),
		chi2=-np.asarray(phi),
		chi2_rate=-phidot/omega1,
	)


def actions_of(orbit: KeplerOrbit) -> DelaunayActions:
	"""Actions whose turning points are the apsides of ``orbit``."""
	a = orbit.p_phi**2/((1 - orbit.mu)*(1 - orbit.e**2))
	return DelaunayActions(math.sqrt(a), orbit.p_phi, mu=orbit.mu)


def state_from_radius(orbit: KeplerOrbit, R, phi) -> PlanarState:
	"""
	State at a continued radius ``R``, from :func:`chi2` and :func:`dR_dtheta1` with the
	actions of :func:`actions_of`. Off the real axis the radial momentum and the arccosine
	in :func:`chi2` are two-valued; the branch taken is the one on which ``phi`` is the true
	anomaly at ``R``. As in :func:`state_from_anomaly` the radial angle is the mean anomaly,
	which runs :math:`1/\\sqrt{1-\\mu}` times faster than the Delaunay angle.
	"""
	actions = actions_of(orbit)
	I1, I2, mu = actions.I1, actions.I2, actions.mu
	real = not np.iscomplexobj(phi) and not np.iscomplexobj(R)
	R = np.asarray(R, dtype=complex)
	phi = np.asarray(phi, dtype=complex)
	velocity = np.sin(phi)/(1 + orbit.e*np.cos(phi))
	sheet = np.where(np.real(_S(R, actions.turning_points)*np.conj(velocity)) >= 0, 1, -1)
	anomaly = -chi2(R, I1, I2, mu)
	anomaly = np.where(np.real(np.sin(anomaly)*np.conj(np.sin(phi))) >= 0, anomaly, -anomaly)
	anomaly = anomaly + TWO_PI*np.round(np.real(phi - anomaly)/TWO_PI)
	parts = (
		R,
		math.sqrt(1 - mu)*dR_dtheta1(R, I1, I2, mu, sheet),
		-anomaly,
		-I2*I1**3/(math.sqrt(1 - mu)*R**2),
	)
	if real:
		parts = tuple(np.real(x) for x in parts)
	return PlanarState(*(x[()] for x in parts))


def colatitude_state(planar: PlanarState, theta1, theta2, I1: float, I2: float, I3: float, mu: float = 0.0) -> SpatialState:
	"""Colatitude quantities over ``planar``, with :math:`\\Psi` from :func:`solve_Psi`."""
	Psi = solve_Psi(theta1, theta2, I1, I2, I3, mu)
	if abs(I2 - I3) <= 1e-14*abs(I2):
		# the colatitude angle degenerates to chi2 - theta2
		return SpatialState(planar, Psi, np.zeros(np.shape(Psi))[()], planar.chi2 - theta2, planar.chi2_rate)
	sheet = np.where(_colatitude_phase(theta1, theta2, I1, I2, mu) <= math.pi, 1, -1)
	Q = _Q(Psi, I2, I3)
	dPsi = -sheet*planar.chi2_rate*Q/(I2*np.sin(Psi))
	with np.errstate(divide='ignore', invalid='ignore'):
		# 0/0 at the turning colatitudes, where Q vanishes
		rate = np.where(Q > 0, dhat_chi3_dpsi(Psi, I2, I3, sheet)*dPsi, planar.chi2_rate*I3/(I2*np.sin(Psi)**2))
	return SpatialState(planar, Psi, dPsi[()], hat_chi3(Psi, I2, I3, sheet), rate[()])


def spatial_state(orbit: KeplerOrbit, phi, theta2: float = 0.0) -> SpatialState:
	"""
	State on the equatorial family :math:`I_2 = I_3` at a (possibly complex) true anomaly:
	the planar part from :func:`state_from_radius` at the continued radius, the colatitude
	part from :func:`colatitude_state`.
	"""
	actions = actions_of(orbit)
	planar = state_from_radius(orbit, radius_of_phi(orbit, phi), phi)
	return colatitude_state(planar, mean_anomaly(orbit, phi), theta2, actions.I1, actions.I2, actions.I2, actions.mu)


def h_bracket(state: PlanarState, theta2):
	"""
	:math:`R_{\\theta_1} R (3\\cos 2(\\theta_2-\\chi_2)+1) + 3R^2 \\chi_{2,r} R_{\\theta_1} \\sin 2(\\theta_2-\\chi_2)`,
	the planar :math:`\\dot I_1` coefficient without its :math:`\\mu/2` factor.
	"""
	u = theta2 - state.chi2
	return state.dR_dtheta1*state.R*(3*np.cos(2*u) + 1) + 3*state.R**2*state.chi2_rate*np.sin(2*u)


def h_hat1_from_state(state: SpatialState, theta3):
	R = state.planar.R
	u = theta3 - state.hat_chi3
	sin, cos = np.sin(state.Psi), np.cos(state.Psi)
	return (
		state.planar.dR_dtheta1*R*sin**2*(3*np.cos(2*u) + 1)
		+ R**2*state.dPsi_dtheta1*sin*cos*(3*np.cos(2*u) + 1)
		+ 3*R**2*sin**2*state.chi3_rate*np.sin(2*u)
	)


def eval_h_hat1(I: Sequence[float], theta: Sequence[float], mu: float = 0.0):
	"""
	Spatial :math:`\\hat h_1(I, \\theta)` at real angles, from :func:`solve_R` and
	:func:`solve_Psi`.
	"""
	I1, I2, I3 = I
	theta1, theta2, theta3 = theta
	state = colatitude_state(planar_state(theta1, I1, I2, mu), theta1, theta2, I1, I2, I3, mu)
	return h_hat1_from_state(state, theta3)[()]


##########################################################################################


def _check_continuity():
	actions = DelaunayActions(1.0, 0.8, mu=0.2)
	tp = actions.turning_points
	values = chi(np.linspace(tp.r_minus, tp.r_plus, 257), actions.I1, actions.I2, actions.mu)
	if np.any(np.diff(values) < -1e-12):
		raise DomainError('chi is not increasing on the outgoing sheet')


_check_continuity()

"""
Resonance detection, the reduced variational equation along a resonant periodic orbit,
its monodromy, and the nonintegrability certificate.

Monodromy elements live in the unipotent group of block matrices

.. math::

	M(C_1, C_2, C_3) = \\begin{pmatrix} I_\\ell & 0 & C_1 \\\\ C_3 & I_m & C_2 \\\\ 0 & 0 & 1 \\end{pmatrix}

whose product, power, inverse and commutator have closed forms in the blocks.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Sequence, Tuple

import numpy as np

from .contour import ContourPath, Line, PathFunction, integrate
from .kepler_core import TWO_PI, KeplerOrbit
from .melnikov import GenericSystem, MARGIN, error_floor

RATIONAL_BOUND = 10**6
RESONANCE_TOL = 1e-9


##########################################################################################


@dataclass(frozen=True, eq=False)
class UnipotentElement:
	C1: np.ndarray
	"""Action block, length ``ell``."""
	C2: np.ndarray
	"""Angle block, length ``m``."""
	C3: np.ndarray
	"""Coupling block, shape ``(m, ell)``."""

	def __post_init__(self):
		C1 = np.atleast_1d(np.asarray(self.C1))
		C2 = np.atleast_1d(np.asarray(self.C2))
		C3 = np.atleast_2d(np.asarray(self.C3))
		if C3.shape != (C2.shape[0], C1.shape[0]):
			raise ValueError(f'C3 must have shape {(C2.shape[0], C1.shape[0])}, got {C3.shape}')
		object.__setattr__(self, 'C1', C1)
		object.__setattr__(self, 'C2', C2)
		object.__setattr__(self, 'C3', C3)

	@classmethod
	def identity(cls, ell: int, m: int) -> UnipotentElement:
		return cls(np.zeros(ell), np.zeros(m), np.zeros((m, ell)))

	@property
	def ell(self) -> int:
		return self.C1.shape[0]

	@property
	def m(self) -> int:
		return self.C2.shape[0]

	def as_matrix(self) -> np.ndarray:
		ell, m = self.ell, self.m
		dtype = np.result_type(self.C1, self.C2, self.C3, float)
		matrix = np.eye(ell + m + 1, dtype=dtype)
		matrix[:ell, -1] = self.C1
		matrix[ell:ell + m, :ell] = self.C3
		matrix[ell:ell + m, -1] = self.C2
		return matrix

	def __matmul__(self, other: UnipotentElement) -> UnipotentElement:
		return unipotent_product(self, other)

	def __pow__(self, k: int) -> UnipotentElement:
		return unipotent_power(self, k)

	def __eq__(self, other) -> bool:
		if not isinstance(other, UnipotentElement):
			return NotImplemented
		return (
			self.C1.shape == other.C1.shape and self.C2.shape == other.C2.shape
			and np.array_equal(self.C1, other.C1) and np.array_equal(self.C2, other.C2) and np.array_equal(self.C3, other.C3)
		)

	def to_dict(self) -> dict:
		return {'C1': self.C1, 'C2': self.C2, 'C3': self.C3}

	def __repr__(self) -> str:
		return f'<UnipotentElement ell={self.ell} m={self.m} C1={self.C1} C2={self.C2}>'


def _check_compatible(a: UnipotentElement, b: UnipotentElement):
	if a.ell != b.ell or a.m != b.m:
		raise ValueError(f'Incompatible dimensions: ({a.ell}, {a.m}) and ({b.ell}, {b.m})')


def unipotent_product(a: UnipotentElement, b: UnipotentElement) -> UnipotentElement:
	_check_compatible(a, b)
	return UnipotentElement(a.C1 + b.C1, a.C3 @ b.C1 + a.C2 + b.C2, a.C3 + b.C3)


def unipotent_power(a: UnipotentElement, k: int) -> UnipotentElement:
	""":math:`M^k = M(kC_1, (k-1)C_3C_1 + kC_2, kC_3)` for any integer ``k``."""
	if k < 0:
		return unipotent_power(unipotent_inverse(a), -k)
	return UnipotentElement(k*a.C1, (k - 1)*(a.C3 @ a.C1) + k*a.C2, k*a.C3)


def unipotent_inverse(a: UnipotentElement) -> UnipotentElement:
	return UnipotentElement(-a.C1, a.C3 @ a.C1 - a.C2, -a.C3)


def commutes(a: UnipotentElement, b: UnipotentElement, rtol: float = 0.0, atol: float = 0.0) -> bool:
	""":math:`ab = ba` exactly when :math:`C_3C_1' = C_3'C_1`."""
	_check_compatible(a, b)
	return bool(np.allclose(a.C3 @ b.C1, b.C3 @ a.C1, rtol=rtol, atol=atol))


##########################################################################################


class _NotResonant:
	_instance = None

	def __new__(cls):
		if cls._instance is None:
			cls._instance = super().__new__(cls)
		return cls._instance

	def __bool__(self) -> bool:
		return False

	def __repr__(self) -> str:
		return 'NotResonant'

	def __reduce__(self):
		return (_NotResonant, ())


NotResonant = _NotResonant()


@dataclass
class ResonanceData:
	I_star: np.ndarray
	omega_star: float
	k_vec: np.ndarray
	d_omega: np.ndarray
	T_star: float = None

	def __post_init__(self):
		self.I_star = np.asarray(self.I_star, dtype=float)
		self.k_vec = np.asarray(self.k_vec, dtype=int)
		self.d_omega = np.atleast_2d(np.asarray(self.d_omega, dtype=float))
		if not self.omega_star > 0:
			raise ValueError(f'Base frequency must be positive: {self.omega_star}')
		if self.T_star is None:
			self.T_star = TWO_PI/self.omega_star

	@property
	def omega(self) -> np.ndarray:
		return self.omega_star*self.k_vec

	def subdivide(self, n: int) -> ResonanceData:
		"""The same torus with base frequency :math:`\\omega^\\ast/n`."""
		return ResonanceData(self.I_star, self.omega_star/n, n*self.k_vec, self.d_omega)

	def __repr__(self) -> str:
		return f'<ResonanceData omega*={self.omega_star:.12g} k={self.k_vec.tolist()} T*={self.T_star:.12g}>'


def detect_resonance(omega_vec: Sequence[float], tol: float = RESONANCE_TOL, Q: int = RATIONAL_BOUND, I_star=None, d_omega=None):
	"""
	Find :math:`\\omega^\\ast > 0` and integers :math:`k` with :math:`\\omega = \\omega^\\ast k`.

	Ratios to the largest component are rationalised with denominators up to ``Q``. Integer
	frequency vectors are handled exactly.

	:param I_star: Actions of the torus, carried into the result.
	:param d_omega: Frequency Jacobian at ``I_star``, carried into the result.
	:return: :class:`ResonanceData` or :data:`NotResonant`.
	"""
	log = logging.getLogger(f'{__name__}.detect_resonance')
	omega = np.asarray(omega_vec, dtype=float)
	if not np.any(omega):
		raise ValueError('The frequency vector vanishes')
	I_star = np.zeros(0) if I_star is None else I_star
	d_omega = np.zeros((omega.shape[0], np.size(I_star))) if d_omega is None else d_omega
	if np.all(omega == np.round(omega)):
		base = math.gcd(*(int(abs(w)) for w in omega))
		return ResonanceData(I_star, float(base), (omega/base).astype(int), d_omega)
	reference = float(omega[np.argmax(np.abs(omega))])
	fractions = [Fraction(w/reference).limit_denominator(Q) for w in omega]
	denominator = math.lcm(*(f.denominator for f in fractions))
	if denominator > Q:
		log.debug(f'Common denominator {denominator} exceeds {Q}')
		return NotResonant
	k_vec = np.array([int(f*denominator) for f in fractions])
	base = reference/denominator
	if base < 0:
		base, k_vec = -base, -k_vec
	if np.any(np.abs(omega/base - k_vec) >= tol):
		log.debug(f'Best rationalisation {k_vec} of {omega} misses by more than {tol}')
		return NotResonant
	return ResonanceData(I_star, base, k_vec, d_omega)


def resonance_for(system: GenericSystem, I_star, subdivide: int = 1, check: bool = True):
	"""
	:class:`ResonanceData` of ``system`` at ``I_star``, or :data:`NotResonant`.

	:param subdivide: Divide the detected base frequency by this factor.
	:param check: Spot check the periodicity of the coefficients first.
	"""
	I_star = np.asarray(I_star, dtype=float)
	if check:
		system.check_periodicity(I_star)
	res = detect_resonance(system.omega(I_star), I_star=I_star, d_omega=system.d_omega(I_star))
	if not res:
		return NotResonant
	return res.subdivide(subdivide) if subdivide != 1 else res


def crtbp_resonance(orbit: KeplerOrbit, n: int = 3, spatial: bool = False) -> ResonanceData:
	"""Resonance of the CRTBP torus through ``orbit`` with :math:`\\omega^\\ast = \\omega_1/n`."""
	I1 = ((1 - orbit.mu)/orbit.omega1)**(1/3)
	m = 3 if spatial else 2
	I_star = np.array([I1] + [orbit.p_phi]*(m - 1))
	d_omega = np.zeros((m, m))
	d_omega[0, 0] = -3*(1 - orbit.mu)/I1**4
	k_vec = np.zeros(m, dtype=int)
	k_vec[0] = n
	return ResonanceData(I_star, orbit.omega1/n, k_vec, d_omega)


##########################################################################################


@dataclass
class FundamentalMatrixData:
	Xi_k: np.ndarray
	""":math:`\\int_0^t h_k\\,d\\tau`."""
	Psi_k: np.ndarray
	""":math:`\\int_0^t (D\\omega\\,\\Xi_k + g_k)\\,d\\tau`."""
	theta: Tuple[float, ...]
	t: complex
	d_omega: np.ndarray
	order: int
	error_estimate: float = 0.0

	@property
	def element(self) -> UnipotentElement:
		return UnipotentElement(self.Xi_k, self.Psi_k, self.d_omega*self.t)

	@property
	def matrix(self) -> np.ndarray:
		return self.element.as_matrix()


class _MomentFunction(PathFunction):
	"""Appends :math:`\\tau h_k` to the stacked ``(h_k, g_k)`` integrand."""

	def __init__(self, base: PathFunction, ell: int):
		self.base = base
		self.ell = ell

	def evaluate(self, index, s, t):
		values = self.base.evaluate(index, s, t)
		return np.concatenate([values, np.asarray(t)[:, None]*values[:, :self.ell]], axis=1)


def _loop_moments(system: GenericSystem, res: ResonanceData, theta, path: ContourPath, tol: float):
	"""Integrals of :math:`h_k`, :math:`g_k` and :math:`\\tau h_k` along ``path``."""
	integrand = _MomentFunction(system.along(res.I_star, theta, path), system.ell)
	result = integrate(path, integrand, tol)
	value = np.asarray(result.value)
	ell, m = system.ell, system.m
	return value[:ell], value[ell:ell + m], value[ell + m:], result.error_estimate


def _angle_block(res: ResonanceData, t1: complex, h, g, moment):
	# integral of (Dw Xi + g) up to t1, with Xi zero at the base point, integrated by parts
	return res.d_omega @ (t1*h - moment) + g


def fundamental_matrix(system: GenericSystem, res: ResonanceData, theta, t: complex, path: ContourPath = None, tol: float = 1e-10) -> FundamentalMatrixData:
	"""
	:math:`\\Phi_k(t) = M(\\Xi_k(t), \\Psi_k(t), D\\omega(I^\\ast)t)`, integrated along ``path``
	(by default the segment from 0 to ``t``).
	"""
	theta = tuple(float(x) for x in np.ravel(theta))
	if t == 0:
		return FundamentalMatrixData(np.zeros(system.ell), np.zeros(system.m), theta, t, res.d_omega, system.k + 1)
	path = path or ContourPath((Line(0j, complex(t)),))
	h, g, moment, error = _loop_moments(system, res, theta, path, tol)
	return FundamentalMatrixData(h, _angle_block(res, t, h, g, moment), theta, t, res.d_omega, system.k + 1, error)


def rve_matrix(system: GenericSystem, res: ResonanceData, theta, t: float) -> np.ndarray:
	"""Coefficient matrix of the reduced variational equation at real time ``t``."""
	ell, m = system.ell, system.m
	angles = (res.omega*t + np.asarray(theta, dtype=float))[:, None]
	A = np.zeros((ell + m + 1, ell + m + 1))
	A[:ell, -1] = np.ravel(system.h_k(res.I_star, angles))
	A[ell:ell + m, :ell] = res.d_omega
	A[ell:ell + m, -1] = np.ravel(system.g_k(res.I_star, angles))
	return A


def monodromy_gamma(system: GenericSystem, res: ResonanceData, theta, gamma: ContourPath, tol: float = 1e-10) -> Tuple[UnipotentElement, float]:
	"""
	Monodromy :math:`M(\\hat C_1, \\hat C_2, 0)` of the continuation of :math:`\\Phi_k` around
	the closed loop ``gamma``, and the error estimate of :math:`\\hat C_1`.
	"""
	if not gamma.is_closed(atol=1e-12*max(1.0, abs(gamma.start))):
		raise ValueError(f'Monodromy needs a closed loop: {gamma}')
	h, g, moment, error = _loop_moments(system, res, theta, gamma, tol)
	C2 = _angle_block(res, gamma.start, h, g, moment)
	return UnipotentElement(h, C2, np.zeros((system.m, system.ell))), error


def monodromy_period(system: GenericSystem, res: ResonanceData, theta, tol: float = 1e-10) -> Tuple[UnipotentElement, float]:
	"""Monodromy :math:`M(\\Xi_k(T^\\ast), \\Psi_k(T^\\ast), D\\omega T^\\ast)` of the real period loop."""
	data = fundamental_matrix(system, res, theta, res.T_star, ContourPath((Line(0j, complex(res.T_star)),), res.T_star), tol)
	return data.element, data.error_estimate


##########################################################################################


class Verdict(enum.Enum):
	POSITIVE = 'POSITIVE'
	INCONCLUSIVE = 'INCONCLUSIVE'


@dataclass
class Certificate:
	system: str
	I_star: np.ndarray
	k_vec: np.ndarray
	theta: Tuple[float, ...]
	C1_hat: np.ndarray
	C2_hat: np.ndarray
	C3_bar: np.ndarray
	margins: Dict[str, float] = field(default_factory=dict)
	verdict: Verdict = Verdict.INCONCLUSIVE
	error_estimate: float = 0.0

	def to_dict(self) -> dict:
		return {
			'system': self.system,
			'I_star': self.I_star,
			'k_vec': self.k_vec,
			'theta': list(self.theta),
			'C1_hat': self.C1_hat,
			'C2_hat': self.C2_hat,
			'C3_bar': self.C3_bar,
			'margins': self.margins,
			'verdict': self.verdict.value,
		}

	def __repr__(self) -> str:
		return f'<Certificate {self.system} theta={self.theta} {self.verdict.value} margins={self.margins}>'


def _margin(value: np.ndarray, scale: float, error: float) -> float:
	magnitude = float(np.max(np.abs(value), initial=0.0))
	if magnitude == 0 or scale == 0:
		return 0.0
	return magnitude/error_floor(scale*error, magnitude)


def certify_nonintegrability(system: GenericSystem, res: ResonanceData, theta, gamma: ContourPath, tol: float = 1e-10) -> Certificate:
	"""
	Compute :math:`M_\\gamma` and :math:`M_{\\bar\\gamma}` and decide whether they witness a
	noncommutative identity component: both :math:`D\\omega\\hat C_1` and :math:`\\bar C_3\\hat C_1`
	must exceed ten times their error bounds. Never concludes integrability.
	"""
	log = logging.getLogger(f'{__name__}.certify_nonintegrability')
	loop, error = monodromy_gamma(system, res, theta, gamma, tol)
	period, _ = monodromy_period(system, res, theta, tol)
	margins = {
		'd_omega_C1': _margin(res.d_omega @ loop.C1, float(np.linalg.norm(res.d_omega, 2)), error),
		'C3_C1': _margin(period.C3 @ loop.C1, float(np.linalg.norm(period.C3, 2)), error),
	}
	positive = all(margin > MARGIN for margin in margins.values())
	certificate = Certificate(
		system=system.name,
		I_star=res.I_star,
		k_vec=res.k_vec,
		theta=tuple(float(x) for x in np.ravel(theta)),
		C1_hat=loop.C1,
		C2_hat=loop.C2,
		C3_bar=period.C3,
		margins=margins,
		verdict=Verdict.POSITIVE if positive else Verdict.INCONCLUSIVE,
		error_estimate=error,
	)
	log.info(f'{certificate}')
	return certificate

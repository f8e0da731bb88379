"""
Piecewise paths in complex time, analytic continuation of the true anomaly along them,
and adaptive Gauss-Legendre quadrature of analytic integrands.

Segments are parametrised by :math:`s \\in [0, 1]`. A path is a tuple of segments; its
integrands are evaluated either as plain callables ``f(t)`` or, when they need to know
where on the path they are, as :class:`PathFunction` instances.
"""
from __future__ import annotations

import abc
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple, Union

import numpy as np

from ._cache import memoize
from .kepler_core import KeplerOrbit, NewtonDivergence, PoleError, dphi_dt, newton_phi, phi_of_time

NODES = 16
MAX_NODES = 1 << 20
MAX_STEP = 1/64
MIN_STEP = 2.0**-20


class GeometryError(ValueError):
	pass


class ContinuationError(ArithmeticError):
	pass


class QuadratureError(ArithmeticError):
	pass


def _pair(z: complex) -> List[float]:
	z = complex(z)
	return [z.real, z.imag]


def _unpair(p: Sequence[float]) -> complex:
	return complex(p[0], p[1])


##########################################################################################


class Segment(abc.ABC):
	"""
	Abstract base class for path pieces. Subclasses register themselves under the ``type``
	key of their JSON description.
	"""
	log = logging.getLogger(f'{__name__}.Segment')
	_subclasses = dict()

	@staticmethod
	def register(kind: str):
		def wrapper(cls):
			Segment._subclasses[kind] = cls
			cls.kind = kind
			return cls
		return wrapper

	@staticmethod
	def for_type(kind: str):
		if kind not in Segment._subclasses:
			raise NameError(f'Unknown segment type: {kind}')
		return Segment._subclasses[kind]

	@abc.abstractmethod
	def point(self, s): pass

	@abc.abstractmethod
	def derivative(self, s): pass

	@property
	@abc.abstractmethod
	def length(self) -> float: pass

	@abc.abstractmethod
	def reversed(self) -> Segment: pass

	@abc.abstractmethod
	def translated(self, dz: complex) -> Segment: pass

	@abc.abstractmethod
	def distance(self, z: complex) -> float: pass

	@abc.abstractmethod
	def to_dict(self) -> dict: pass

	@property
	def start(self) -> complex:
		return complex(self.point(0.0))

	@property
	def end(self) -> complex:
		return complex(self.point(1.0))


@Segment.register('line')
@dataclass(frozen=True)
class Line(Segment):
	z0: complex
	z1: complex

	def point(self, s):
		return self.z0 + (self.z1 - self.z0)*np.asarray(s, dtype=float)

	def derivative(self, s):
		return np.full(np.shape(s), self.z1 - self.z0, dtype=complex)[()]

	@property
	def start(self) -> complex:
		return complex(self.z0)

	@property
	def end(self) -> complex:
		return complex(self.z1)

	@property
	def length(self) -> float:
		return abs(self.z1 - self.z0)

	def reversed(self) -> Line:
		return Line(self.z1, self.z0)

	def translated(self, dz: complex) -> Line:
		return Line(self.z0 + dz, self.z1 + dz)

	def distance(self, z: complex) -> float:
		d = self.z1 - self.z0
		if d == 0:
			return abs(z - self.z0)
		s = min(max(((z - self.z0)*d.conjugate()).real/abs(d)**2, 0.0), 1.0)
		return abs(z - self.point(s))

	def to_dict(self) -> dict:
		return {'type': self.kind, 'z0': _pair(self.z0), 'z1': _pair(self.z1)}

	@classmethod
	def from_dict(cls, d: dict) -> Line:
		return cls(_unpair(d['z0']), _unpair(d['z1']))

	def __repr__(self) -> str:
		return f'<Line {self.z0} -> {self.z1}>'


@Segment.register('arc')
@dataclass(frozen=True)
class Arc(Segment):
	center: complex
	radius: float
	angle_start: float
	angle_end: float
	"""Angles in radians; ``angle_end < angle_start`` runs clockwise."""

	def _angle(self, s):
		return self.angle_start + (self.angle_end - self.angle_start)*np.asarray(s, dtype=float)

	def point(self, s):
		return self.center + self.radius*np.exp(1j*self._angle(s))

	def derivative(self, s):
		return 1j*(self.angle_end - self.angle_start)*self.radius*np.exp(1j*self._angle(s))

	@property
	def length(self) -> float:
		return self.radius*abs(self.angle_end - self.angle_start)

	def reversed(self) -> Arc:
		return Arc(self.center, self.radius, self.angle_end, self.angle_start)

	def translated(self, dz: complex) -> Arc:
		return Arc(self.center + dz, self.radius, self.angle_start, self.angle_end)

	def distance(self, z: complex) -> float:
		sweep = self.angle_end - self.angle_start
		angle = math.atan2((z - self.center).imag, (z - self.center).real)
		candidates = [abs(z - self.start), abs(z - self.end)]
		if sweep != 0:
			for k in range(-3, 4):
				s = (angle + 2*math.pi*k - self.angle_start)/sweep
				if 0 <= s <= 1:
					candidates.append(abs(abs(z - self.center) - self.radius))
		return min(candidates)

	def to_dict(self) -> dict:
		return {
			'type': self.kind,
			'center': _pair(self.center),
			'radius': self.radius,
			'angle_start': self.angle_start,
			'angle_end': self.angle_end,
		}

	@classmethod
	def from_dict(cls, d: dict) -> Arc:
		return cls(_unpair(d['center']), d['radius'], d['angle_start'], d['angle_end'])

	def __repr__(self) -> str:
		return f'<Arc center={self.center} radius={self.radius} {self.angle_start:.4f} -> {self.angle_end:.4f}>'


@dataclass(frozen=True)
class ContourPath:
	segments: Tuple[Segment, ...]
	period_cell: float = None
	"""Period :math:`T^\\ast` of the time cylinder, if the path lives on one."""
	clearance_min: float = None
	"""Minimum distance to the singular times, recorded at construction."""

	def __post_init__(self):
		object.__setattr__(self, 'segments', tuple(self.segments))
		if not self.segments:
			raise GeometryError('A path needs at least one segment')

	def __len__(self):
		return len(self.segments)

	def __iter__(self):
		return iter(self.segments)

	@property
	def start(self) -> complex:
		return self.segments[0].start

	@property
	def end(self) -> complex:
		return self.segments[-1].end

	@property
	def length(self) -> float:
		return sum(seg.length for seg in self.segments)

	def _reduce(self, dz: complex) -> complex:
		if self.period_cell:
			dz -= self.period_cell*round(dz.real/self.period_cell)
		return dz

	def is_closed(self, atol: float = 0.0) -> bool:
		"""End equals start, modulo the period cell when there is one."""
		return abs(self._reduce(self.end - self.start)) <= atol

	def is_connected(self, atol: float = 1e-12) -> bool:
		scale = max(1.0, max(abs(seg.start) for seg in self.segments))
		return all(
			abs(a.end - b.start) <= atol*scale
			for a, b in zip(self.segments, self.segments[1:])
		)

	def clearance(self, points: Sequence[complex]) -> float:
		return min(seg.distance(complex(p)) for seg in self.segments for p in points)

	def reversed(self) -> ContourPath:
		return ContourPath(tuple(seg.reversed() for seg in reversed(self.segments)), self.period_cell, self.clearance_min)

	def concat(self, other: ContourPath) -> ContourPath:
		return ContourPath(self.segments + other.segments, self.period_cell or other.period_cell)

	def translated(self, dz: complex) -> ContourPath:
		return ContourPath(tuple(seg.translated(dz) for seg in self.segments), self.period_cell, self.clearance_min)

	def to_dict(self) -> dict:
		return {
			'period_cell': self.period_cell,
			'clearance_min': self.clearance_min,
			'segments': [seg.to_dict() for seg in self.segments],
		}

	@classmethod
	def from_dict(cls, d: dict) -> ContourPath:
		segments = tuple(Segment.for_type(s['type']).from_dict(s) for s in d['segments'])
		return cls(segments, d.get('period_cell'), d.get('clearance_min'))

	def __repr__(self) -> str:
		return f'<ContourPath {len(self.segments)} segments, start={self.start}, closed={self.is_closed(1e-12)}>'


##########################################################################################


def build_gamma(Tstar: float, k1_over_omega1: float, delta: float, M: float, side: str = 'left') -> ContourPath:
	"""
	The loop :math:`\\gamma_\\theta` on the cylinder of period ``Tstar``.

	Starting at :math:`T = T^\\ast/3` it runs right along the real axis to :math:`2T`, up the
	line :math:`\\Re t = 2T` past the singular time :math:`2T + ik` on a half circle of
	radius ``delta``, left along the top at height ``M``, and down :math:`\\Re t = T` past
	:math:`T + ik` on the mirrored half circle. With ``side='left'`` both half circles bulge
	towards smaller real part, so the loop encircles :math:`T + ik` once and leaves
	:math:`2T + ik` outside; ``side='right'`` does the opposite.

	:raises GeometryError: unless :math:`0 < \\delta < k`, :math:`\\delta < T/2` and :math:`M > k + \\delta`.
	"""
	T = Tstar/3
	k = k1_over_omega1
	if not 0 < delta < k:
		raise GeometryError(f'delta must lie in (0, {k}): {delta}')
	if not delta < T/2:
		raise GeometryError(f'delta={delta} does not fit between the singular times (T={T})')
	if not M > k + delta:
		raise GeometryError(f'M={M} must exceed k + delta = {k + delta}')
	if side not in ('left', 'right'):
		raise GeometryError(f'Unknown side: {side}')
	half = math.pi/2
	if side == 'left':
		right_arc = Arc(complex(2*T, k), delta, -half, -3*half)
		left_arc = Arc(complex(T, k), delta, half, 3*half)
	else:
		right_arc = Arc(complex(2*T, k), delta, -half, half)
		left_arc = Arc(complex(T, k), delta, half, -half)
	segments = (
		Line(complex(T, 0), complex(2*T, 0)),
		Line(complex(2*T, 0), complex(2*T, k - delta)),
		right_arc,
		Line(complex(2*T, k + delta), complex(2*T, M)),
		Line(complex(2*T, M), complex(T, M)),
		Line(complex(T, M), complex(T, k + delta)),
		left_arc,
		Line(complex(T, k - delta), complex(T, 0)),
	)
	singular = [complex(n*T, sign*k) for n in range(4) for sign in (1, -1)]
	return ContourPath(segments, Tstar, ContourPath(segments).clearance(singular))


def build_circle(center: complex, radius: float, turns: int = 1) -> ContourPath:
	"""Closed circle starting at ``center + radius``, traversed ``turns`` times counterclockwise."""
	if radius <= 0:
		raise GeometryError(f'Radius must be positive: {radius}')
	return ContourPath((Arc(center, radius, 0.0, 2*math.pi*turns),))


def build_segment_path(points: Sequence[complex], period_cell: float = None) -> ContourPath:
	if len(points) < 2:
		raise GeometryError('A polyline needs at least two points')
	return ContourPath(tuple(Line(complex(a), complex(b)) for a, b in zip(points, points[1:])), period_cell)


##########################################################################################


class PathFunction(abc.ABC):
	"""
	An integrand that needs its position on the path, not just the time. ``index`` is the
	segment number, ``s`` the array of segment parameters and ``t`` the matching times.
	"""

	@abc.abstractmethod
	def evaluate(self, index: int, s: np.ndarray, t: np.ndarray) -> np.ndarray:
		pass


Integrand = Union[PathFunction, Callable[[np.ndarray], np.ndarray]]


def _values(f: Integrand, index: int, s, t):
	if isinstance(f, PathFunction):
		return np.asarray(f.evaluate(index, s, t))
	return np.asarray(f(t))


@dataclass
class _Track:
	s: np.ndarray
	phi: np.ndarray


class ContinuedPhi:
	"""
	The true anomaly continued along a path. The sampled track seeds a Newton polish at
	arbitrary parameters.
	"""
	log = logging.getLogger(f'{__name__}.ContinuedPhi')

	def __init__(self, orbit: KeplerOrbit, path: ContourPath, tracks: List[_Track]):
		self.orbit = orbit
		self.path = path
		self.tracks = tracks

	@property
	def start(self) -> complex:
		return complex(self.tracks[0].phi[0])

	@property
	def end(self) -> complex:
		return complex(self.tracks[-1].phi[-1])

	def at(self, index: int, s) -> np.ndarray:
		"""Anomaly at parameters ``s`` of segment ``index``."""
		segment = self.path.segments[index]
		track = self.tracks[index]
		s = np.asarray(s, dtype=float)
		nearest = np.clip(np.searchsorted(track.s, s), 1, len(track.s) - 1)
		nearest = np.where(np.abs(track.s[nearest - 1] - s) < np.abs(track.s[nearest] - s), nearest - 1, nearest)
		s0 = track.s[nearest]
		phi0 = track.phi[nearest]
		seed = phi0 + dphi_dt(self.orbit, phi0)*segment.derivative(s0)*(s - s0)
		t = segment.point(s)
		try:
			return newton_phi(self.orbit, t, seed)
		except (NewtonDivergence, PoleError):
			self.log.debug(f'Vectorised polish failed on segment {index}, stepping node by node')
			return np.array([
				_march(self.orbit, segment, a, b, p)
				for a, b, p in zip(np.ravel(s0), np.ravel(s), np.ravel(phi0))
			]).reshape(s.shape)[()]

	def restricted(self, index: int) -> ContinuedPhi:
		"""The continuation over segment ``index`` alone, as a one-segment path."""
		return ContinuedPhi(self.orbit, ContourPath((self.path.segments[index],), self.path.period_cell), [self.tracks[index]])

	def __repr__(self) -> str:
		return f'<ContinuedPhi {self.orbit} start={self.start} end={self.end}>'


def _rk4(orbit: KeplerOrbit, segment: Segment, s: float, phi: complex, h: float) -> complex:
	def rate(s, phi):
		return dphi_dt(orbit, phi)*segment.derivative(s)
	a = rate(s, phi)
	b = rate(s + h/2, phi + h/2*a)
	c = rate(s + h/2, phi + h/2*b)
	d = rate(s + h, phi + h*c)
	return phi + h/6*(a + 2*b + 2*c + d)


def _march(orbit: KeplerOrbit, segment: Segment, s0: float, s1: float, phi0: complex) -> complex:
	track = _follow(orbit, segment, phi0, s0, s1, max_step=min(MAX_STEP, abs(s1 - s0)/4 or MAX_STEP))
	return complex(track.phi[-1])


def _follow(orbit: KeplerOrbit, segment: Segment, phi: complex, s0: float = 0.0, s1: float = 1.0, max_step: float = MAX_STEP) -> _Track:
	"""
	Predictor-corrector continuation of the anomaly along one segment, from ``s0`` to ``s1``.
	"""
	log = logging.getLogger(f'{__name__}._follow')
	direction = 1.0 if s1 >= s0 else -1.0
	s, h = s0, max_step
	points_s, points_phi = [s], [complex(phi)]
	while direction*(s1 - s) > 0:
		h = min(h, direction*(s1 - s))
		prediction = _rk4(orbit, segment, s, phi, direction*h)
		try:
			correction = complex(newton_phi(orbit, segment.point(s + direction*h), prediction))
			accepted = abs(correction - prediction) <= 0.1*abs(prediction - phi) + 1e-10
		except (NewtonDivergence, PoleError):
			accepted = False
		if not accepted:
			h /= 2
			log.debug(f'Halving step to {h} at s={s} on {segment}')
			if h < MIN_STEP:
				raise ContinuationError(f'Step size fell below {MIN_STEP} at s={s} on {segment}')
			continue
		s += direction*h
		phi = correction
		points_s.append(s)
		points_phi.append(phi)
		h = min(2*h, max_step)
	return _Track(np.array(points_s), np.array(points_phi, dtype=complex))


def continue_phi(orbit: KeplerOrbit, path: ContourPath, start_phi: complex = None) -> ContinuedPhi:
	"""
	Continue the true anomaly along ``path``, segment by segment.

	The start value is the real anomaly at the real part of the first point. A start off
	the real axis is reached along the vertical line from the real axis, unless
	``start_phi`` is given.
	"""
	log = logging.getLogger(f'{__name__}.continue_phi')
	z0 = path.start
	if start_phi is None:
		phi = complex(phi_of_time(orbit, z0.real))
		if z0.imag != 0:
			climb = Line(complex(z0.real, 0), z0)
			phi = complex(_follow(orbit, climb, phi).phi[-1])
	else:
		phi = complex(start_phi)
	tracks = []
	for index, segment in enumerate(path.segments):
		track = _follow(orbit, segment, phi)
		tracks.append(track)
		phi = complex(track.phi[-1])
		log.debug(f'Segment {index}: {len(track.s)} track points, phi(end)={phi}')
	return ContinuedPhi(orbit, path, tracks)


class AnomalyFunction(PathFunction):
	"""Integrand ``func(phi, t)`` of the continued anomaly."""

	def __init__(self, phi: ContinuedPhi, func: Callable[[np.ndarray, np.ndarray], np.ndarray]):
		self.phi = phi
		self.func = func

	def evaluate(self, index: int, s: np.ndarray, t: np.ndarray) -> np.ndarray:
		return self.func(self.phi.at(index, s), t)


##########################################################################################


@dataclass
class QuadratureResult:
	value: complex
	error_estimate: float = 0.0
	nodes_used: int = 0

	def __add__(self, other: QuadratureResult) -> QuadratureResult:
		return QuadratureResult(self.value + other.value, self.error_estimate + other.error_estimate, self.nodes_used + other.nodes_used)

	def __neg__(self) -> QuadratureResult:
		return QuadratureResult(-self.value, self.error_estimate, self.nodes_used)

	def __repr__(self) -> str:
		return f'<QuadratureResult value={self.value} error={self.error_estimate:.3g} nodes={self.nodes_used}>'


@memoize(maxsize=16)
def gauss_legendre(n: int = NODES) -> Tuple[np.ndarray, np.ndarray]:
	return np.polynomial.legendre.leggauss(n)


def _panel(f: Integrand, index: int, segment: Segment, a: float, b: float):
	x, w = gauss_legendre(NODES)
	s = (a + b)/2 + (b - a)/2*x
	values = _values(f, index, s, segment.point(s))
	jacobian = segment.derivative(s)*(b - a)/2
	jacobian = jacobian.reshape(jacobian.shape + (1,)*(values.ndim - 1))
	return np.tensordot(w, values*jacobian, axes=(0, 0))


def _integrate_segment(f: Integrand, index: int, segment: Segment, tol: float, budget: int) -> QuadratureResult:
	log = logging.getLogger(f'{__name__}._integrate_segment')
	eps = np.finfo(float).eps
	whole = _panel(f, index, segment, 0.0, 1.0)
	nodes = NODES
	stack = [(0.0, 1.0, whole, 0)]
	total, error, deepest = 0, 0.0, 0
	while stack:
		a, b, Q, depth = stack.pop()
		mid = (a + b)/2
		left = _panel(f, index, segment, a, mid)
		right = _panel(f, index, segment, mid, b)
		nodes += 2*NODES
		refined = left + right
		estimate = float(np.max(np.abs(Q - refined)))
		floor = 50*eps*float(np.max(np.abs(refined), initial=0.0))
		if estimate <= max(tol*(b - a), floor):
			total = total + refined
			error += estimate
			deepest = max(deepest, depth)
			continue
		if nodes > budget:
			raise QuadratureError(f'Node budget {budget} exhausted on {segment} at [{a}, {b}] (estimate {estimate})')
		stack.append((a, mid, left, depth + 1))
		stack.append((mid, b, right, depth + 1))
	log.debug(f'{segment}: {nodes} nodes, depth {deepest}')
	return QuadratureResult(total, error, nodes)


def integrate_segments(path: ContourPath, f: Integrand, tol: float = 1e-10, max_nodes: int = MAX_NODES) -> List[QuadratureResult]:
	"""
	Integrate ``f`` over each segment of ``path``. The tolerance is shared among segments
	in proportion to their length.
	"""
	length = path.length
	if length <= 0:
		raise GeometryError('Cannot integrate over a path of zero length')
	results = []
	for index, segment in enumerate(path.segments):
		share = tol*segment.length/length
		results.append(_integrate_segment(f, index, segment, share, max_nodes))
		max_nodes -= results[-1].nodes_used
	return results


def integrate(path: ContourPath, f: Integrand, tol: float = 1e-10, max_nodes: int = MAX_NODES) -> QuadratureResult:
	"""
	Adaptive Gauss-Legendre integral of ``f`` along ``path``.

	Each panel is compared with its two halves; a panel is accepted when they agree within
	its share of ``tol``. Vector-valued integrands return arrays of shape ``(n, d)``.

	:raises QuadratureError: when ``max_nodes`` evaluations do not reach ``tol``.
	"""
	results = integrate_segments(path, f, tol, max_nodes)
	total = results[0]
	for result in results[1:]:
		total = total + result
	return total


def winding_number(path: ContourPath, point: complex, tol: float = 1e-8) -> int:
	result = integrate(path, lambda t: 1/(t - point), tol)
	return int(round((result.value/(2j*math.pi)).real))

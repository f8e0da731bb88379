import unittest

from .mocks import *

import math

import numpy as np

from MelnikovCert.contour import (Arc, ContourPath, GeometryError, Line, QuadratureError, build_circle, build_gamma,
                                  build_segment_path, continue_phi, integrate, integrate_segments, winding_number)
from MelnikovCert.kepler_core import KeplerOrbit, k1, mean_anomaly
from MelnikovCert.melnikov import ContourParams


def _wrapped(z):
	return z - 2*math.pi*np.round(np.real(z)/(2*math.pi))


class TestGamma(unittest.TestCase):
	def setUp(self):
		self.orbit = KeplerOrbit.resonant(0.5, 0.3)
		self.T = self.orbit.period
		self.k = k1(0.5)/self.orbit.omega1
		self.params = ContourParams()
		self.gamma = self.params.to_gamma(self.orbit)
		self.delta = self.params.delta_factor*self.k

	def test_closed_and_connected(self):
		self.assertEqual(len(self.gamma), 8, f'The loop should have eight segments: {self.gamma}')
		self.assertTrue(self.gamma.is_connected(), f'Consecutive segments should meet: {self.gamma}')
		self.assertTrue(self.gamma.is_closed(), f'The loop should close: {self.gamma}')
		self.assertAlmostEqual(self.gamma.start, complex(self.T, 0), delta=1e-12*self.T, msg='The loop should start at T on the real axis.')

	def test_clearance(self):
		singular = [complex(self.T, self.k), complex(2*self.T, self.k)]
		clearance = self.gamma.clearance(singular)

		self.assertAlmostEqual(clearance, self.delta, delta=1e-9*self.delta, msg=f'The loop should pass the singular times at distance delta.')
		self.assertAlmostEqual(self.gamma.clearance_min, self.delta, delta=1e-9*self.delta, msg='The clearance should be recorded on the path.')

	def test_clearance_measured(self):
		singular = [complex(n*self.T, sign*self.k) for n in range(4) for sign in (1, -1)]
		for factor in (0.05, 0.3, 0.45):
			delta = factor*min(self.T, self.k)
			gamma = build_gamma(3*self.T, self.k, delta, 3*self.k)
			measured = ContourPath(gamma.segments).clearance(singular)

			self.assertEqual(gamma.clearance_min, measured, f'The recorded clearance should be measured from the segments at delta={delta}.')
			self.assertAlmostEqual(measured, delta, delta=1e-9*delta, msg=f'The arcs should be the closest approach at delta={delta}.')

	def test_winding_left(self):
		self.assertEqual(winding_number(self.gamma, complex(self.T, self.k)), 1, 'The left loop should encircle T + ik.')
		self.assertEqual(winding_number(self.gamma, complex(2*self.T, self.k)), 0, 'The left loop should leave 2T + ik outside.')

	def test_winding_right(self):
		gamma = ContourParams(side='right').to_gamma(self.orbit)

		self.assertEqual(winding_number(gamma, complex(self.T, self.k)), 0, 'The right loop should leave T + ik outside.')
		self.assertEqual(winding_number(gamma, complex(2*self.T, self.k)), 1, 'The right loop should encircle 2T + ik.')

	def test_sides_differ_in_arcs_only(self):
		right = ContourParams(side='right').to_gamma(self.orbit)
		differing = [i for i, (a, b) in enumerate(zip(self.gamma, right)) if a != b]

		self.assertEqual(differing, [2, 6], f'Only the half circles should change with the side: {differing}')

	def test_geometry_errors(self):
		Tstar = 3*self.T
		for delta, M in ((self.k, 10*self.k), (0.0, 10*self.k), (0.05*self.k, self.k)):
			with self.assertRaises(GeometryError, msg=f'delta={delta}, M={M} should be rejected.'):
				build_gamma(Tstar, self.k, delta, M)
		with self.assertRaises(GeometryError, msg='Unknown sides should be rejected.'):
			build_gamma(Tstar, self.k, 0.05*self.k, 10*self.k, 'up')

	def test_exact_differential(self):
		result = integrate(self.gamma, lambda t: np.ones_like(t))

		self.assertLess(abs(result.value), 1e-9, f'The integral of dz around a closed loop should vanish: {result}')

	def test_periodic_legs_cancel(self):
		parts = integrate_segments(self.gamma, periodic_function(self.T))
		rising = sum(r.value for r in parts[1:4])
		falling = sum(r.value for r in parts[5:8])

		self.assertGreater(abs(rising), 1e-3, f'Each leg alone should not vanish: {rising}')
		self.assertLess(abs(rising + falling), 1e-8, f'The legs should cancel for a T-periodic function: {rising} + {falling}')

	def test_json_dict(self):
		restored = ContourPath.from_dict(self.gamma.to_dict())

		self.assertEqual(restored, self.gamma, f'The loop should survive to_dict/from_dict: {restored}')


class TestQuadrature(unittest.TestCase):
	def test_cauchy(self):
		result = integrate(build_circle(0j, 1.0), lambda t: 1/t)

		self.assertAlmostEqual(result.value, 2j*math.pi, delta=1e-10, msg=f'The integral of dz/z should be 2 pi i: {result}')

	def test_winding_number(self):
		self.assertEqual(winding_number(build_circle(0j, 1.0, turns=2), 0.2j), 2, 'Two turns should wind twice.')
		self.assertEqual(winding_number(build_circle(0j, 1.0), 3.0), 0, 'Outside points should not be wound.')

	def test_additivity(self):
		a = build_segment_path([0, 1 + 1j, 2])
		b = build_segment_path([2, 3j, -1])

		def f(t):
			return np.exp(t)*np.cos(t)
		whole = integrate(a.concat(b), f).value
		parts = integrate(a, f).value + integrate(b, f).value

		self.assertAlmostEqual(whole, parts, delta=1e-10, msg='Integrals should add over concatenated paths.')

	def test_reversal(self):
		path = ContourPath((Line(0j, 1 + 1j), Arc(0j, abs(1 + 1j), math.pi/4, math.pi)))

		def f(t):
			return np.sin(t)/(t - 3)
		forward = integrate(path, f).value
		backward = integrate(path.reversed(), f).value

		self.assertAlmostEqual(forward, -backward, delta=1e-10, msg='Reversing the path should flip the sign.')

	def test_tolerance_consistency(self):
		circle = build_circle(0j, 1.0)

		def f(t):
			return 1/(t - 0.5)
		coarse = integrate(circle, f, tol=1e-8)
		fine = integrate(circle, f, tol=1e-11)

		self.assertLess(abs(coarse.value - fine.value), 1e-7, f'Refining the tolerance should agree with the coarse result: {coarse} {fine}')
		self.assertGreaterEqual(fine.nodes_used, coarse.nodes_used, 'Finer tolerance should not use fewer nodes.')

	def test_node_budget(self):
		with self.assertRaises(QuadratureError, msg='An exhausted node budget should raise.'):
			integrate(build_circle(0j, 1.0), lambda t: 1/(t - 0.99), tol=1e-14, max_nodes=64)

	def test_vector_integrand(self):
		result = integrate(build_segment_path([0, 1]), lambda t: np.stack([t, t**2], axis=1))

		self.assertEqual(np.shape(result.value), (2,), f'Vector integrands should give vector results: {result}')
		self.assertAlmostEqual(result.value[1], 1/3, delta=1e-14, msg=f'The integral of t^2 should be 1/3: {result}')


class TestContinuation(unittest.TestCase):
	def setUp(self):
		self.orbit = KeplerOrbit.resonant(0.5, 0.3)
		self.T = self.orbit.period
		self.k = k1(0.5)/self.orbit.omega1

	def test_real_segment(self):
		path = build_segment_path([self.T, 2*self.T])
		phi = continue_phi(self.orbit, path)
		track = phi.tracks[0].phi

		self.assertLess(np.max(np.abs(track.imag)), 1e-12, 'The anomaly should stay real on the real axis.')
		self.assertTrue(np.all(np.diff(track.real) > 0), 'The anomaly should increase along the real axis.')
		self.assertAlmostEqual(phi.end.real - phi.start.real, 2*math.pi, delta=1e-10, msg='One period should advance phi by 2 pi.')

	def test_kepler_relation_on_gamma(self):
		phi = continue_phi(self.orbit, ContourParams().to_gamma(self.orbit))
		for index in (0, 1, 3, 4, 5, 7):
			s = np.linspace(0, 1, 84)
			t = phi.path.segments[index].point(s)
			residual = np.max(np.abs(_wrapped(mean_anomaly(self.orbit, phi.at(index, s)) - self.orbit.omega1*t)))

			self.assertLess(residual, 1e-10, f'The continued anomaly should satisfy the Kepler relation on segment {index}: {residual}')

	def test_growth_towards_singular_time(self):
		heights = []
		for fraction in (0.1, 0.01):
			path = build_segment_path([self.T, complex(self.T, (1 - fraction)*self.k)])
			heights.append(abs(continue_phi(self.orbit, path).end.imag))

		self.assertGreater(heights[1], heights[0], f'|Im phi| should grow towards the singular time: {heights}')

	def test_contractible_loop(self):
		path = build_circle(complex(self.T/2, 0.5*self.k), 0.1*self.k)
		phi = continue_phi(self.orbit, path)

		self.assertLess(abs(phi.end - phi.start), 1e-10, f'A loop around no singular time should return phi: {phi}')

	def test_branch_around_singular_time(self):
		center = complex(self.T, self.k)
		once = continue_phi(self.orbit, build_circle(center, 0.05*self.k, turns=1))
		twice = continue_phi(self.orbit, build_circle(center, 0.05*self.k, turns=2))

		self.assertGreater(abs(_wrapped(once.end - once.start)), 1e-3, f'One turn should change the sheet: {once}')
		self.assertLess(abs(_wrapped(twice.end - twice.start)), 1e-8, f'Two turns should restore the sheet: {twice}')

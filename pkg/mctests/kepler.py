import unittest

from .mocks import *

import math

import numpy as np

from MelnikovCert._cache import clear
from MelnikovCert.kepler_core import (BranchDomainError, KeplerOrbit, PoleError, dphi_dt, eccentric_anomaly, k1, k1_asymptote_check,
                                      k2, mean_anomaly, phi_of_time, pole_phi, radius_of_phi, singular_times, singularity_data,
                                      time_of_flight)


class TestKepler(unittest.TestCase):
	def setUp(self):
		self.orbit = KeplerOrbit.resonant(0.5, 0.3)

	def test_k1_reference_value(self):
		self.assertAlmostEqual(k1(0.5), 0.4509325, delta=1e-6, msg=f'K1(0.5) should be 0.4509325, got {k1(0.5)}.')

	def test_k1_decreasing(self):
		values = np.array([k1(e) for e in np.linspace(0.05, 0.95, 200)])

		self.assertTrue(np.all(np.diff(values) < 0), f'K1 should decrease strictly with e: {values}')
		self.assertTrue(np.all(values > 0), f'K1 should be positive on (0, 1): {values}')
		self.assertLess(k1(0.9999), 1e-3, f'K1 should vanish as e -> 1, got {k1(0.9999)}.')

	def test_k1_domain(self):
		for e in (0.0, 1.0, -0.2, 1.5):
			with self.assertRaises(ValueError, msg=f'K1({e}) should be rejected.'):
				k1(e)

	def test_k2(self):
		self.assertAlmostEqual(k2(0.5), math.acosh(2), places=14, msg=f'K2(0.5) should be acosh(2).')

	def test_resonant_mean_motion(self):
		self.assertAlmostEqual(self.orbit.omega1, 0.7, places=14, msg=f'Mean motion should be 1 - mu, got {self.orbit.omega1}.')
		self.assertAlmostEqual(self.orbit.period*self.orbit.omega1, 2*math.pi, places=12, msg=f'Period and mean motion should match for {self.orbit}.')

	def test_orbit_validation(self):
		for args in ((0.3, 1.0, 1.0), (1.0, 0.5, 1.0), (0.3, 0.5, 0.0)):
			with self.assertRaises(ValueError, msg=f'KeplerOrbit{args} should be rejected.'):
				KeplerOrbit(*args)

	def test_branches_agree(self):
		for phi in np.linspace(0.1, 3.0, 13):
			a = time_of_flight(self.orbit, phi, 'principal')
			b = time_of_flight(self.orbit, phi, 'shifted')

			self.assertAlmostEqual(a, b, places=12, msg=f'Branches should agree at phi={phi}: {a} != {b}')

	def test_half_period(self):
		for e in (0.2, 0.5, 0.8):
			orbit = KeplerOrbit.resonant(e, 0.3)
			phi = phi_of_time(orbit, orbit.period/2)

			self.assertAlmostEqual(float(phi), math.pi, places=9, msg=f'Aphelion should come at half the period for e={e}, got {phi}.')

	def test_time_of_flight_odd(self):
		for phi in (0.3, 1.2, 2.9, complex(0.5, 0.3), complex(2.0, -0.7)):
			forward = time_of_flight(self.orbit, phi)
			backward = time_of_flight(self.orbit, -phi)

			self.assertAlmostEqual(backward, -forward, places=12, msg=f'The time of flight should be odd in phi at {phi}: {backward} != {-forward}')

	def test_branch_domain(self):
		with self.assertRaises(BranchDomainError, msg='The principal branch should reject Re phi > pi.'):
			time_of_flight(self.orbit, 3.5, 'principal')
		with self.assertRaises(BranchDomainError, msg='The shifted branch should reject Re phi < 0.'):
			time_of_flight(self.orbit, -0.5, 'shifted')
		with self.assertRaises(BranchDomainError, msg='Unknown branch names should be rejected.'):
			time_of_flight(self.orbit, 0.5, 'other')

	def test_kepler_equation(self):
		M = np.linspace(-7, 13, 101)
		for e in (0.01, 0.5, 0.95):
			E = eccentric_anomaly(M, e)
			residual = np.max(np.abs(E - e*np.sin(E) - M))

			self.assertLess(residual, 1e-13, f'Kepler equation residual for e={e} should vanish, got {residual}.')

	def test_real_time_round_trip(self):
		t = np.linspace(0, 2*self.orbit.period, 257)
		phi = phi_of_time(self.orbit, t)
		z = np.real(mean_anomaly(self.orbit, phi))

		self.assertLess(np.max(np.abs(z - self.orbit.omega1*t)), 1e-11, 'Mean anomaly of phi(t) should be omega1 t.')
		self.assertTrue(np.all(np.diff(phi) > 0), 'The real anomaly should increase with time.')

	def test_angular_velocity(self):
		h = 1e-5
		for t in np.linspace(0.1, self.orbit.period, 9):
			numeric = (phi_of_time(self.orbit, t + h) - phi_of_time(self.orbit, t - h))/(2*h)
			exact = dphi_dt(self.orbit, phi_of_time(self.orbit, t))

			self.assertLess(abs(numeric - exact), 1e-8, f'dphi/dt at t={t} should match the finite difference: {numeric} != {exact}')

	def test_complex_time_needs_seed(self):
		with self.assertRaises(ValueError, msg='Complex times without a seed should be rejected.'):
			phi_of_time(self.orbit, 1 + 0.5j)

	def test_complex_newton(self):
		seed = 0.3 + 0.2j
		t = time_of_flight(self.orbit, seed)
		phi = phi_of_time(self.orbit, t, seed + 0.01)

		self.assertAlmostEqual(abs(phi - seed), 0.0, places=10, msg=f'Newton should recover phi={seed}, got {phi}.')

	def test_k1_asymptote(self):
		for e in (0.2, 0.5, 0.8):
			orbit = KeplerOrbit.resonant(e, 0.3)
			z = k1_asymptote_check(orbit, 30.0)

			self.assertLess(abs(z - 1j*k1(e)), 1e-10, f'omega1 t should approach i K1 for e={e}, got {z}.')

	def test_pole(self):
		with self.assertRaises(PoleError, msg='The radius should not be evaluated at the pole.'):
			radius_of_phi(self.orbit, pole_phi(self.orbit.e))

	def test_singular_times(self):
		times = singular_times(self.orbit, 3*self.orbit.period)
		height = k1(self.orbit.e)/self.orbit.omega1

		self.assertEqual(len(times), 3, f'There should be three singular times per cell: {times}')
		for n, t in enumerate(times):
			self.assertAlmostEqual(t, complex(n*self.orbit.period, height), places=12, msg=f'Singular time {n} misplaced: {t}')

	def test_singularity_data_cached(self):
		a = singularity_data(self.orbit, 3*self.orbit.period)
		b = singularity_data(self.orbit, 3*self.orbit.period)

		self.assertIs(a, b, 'Singularity data should be memoised per orbit.')

		clear(singularity_data)
		c = singularity_data(self.orbit, 3*self.orbit.period)

		self.assertIsNot(a, c, 'Clearing the cache should force a fresh computation.')
		self.assertEqual(a.singular_times, c.singular_times, f'Recomputed singular times differ: {a.singular_times} != {c.singular_times}')

import unittest

from .mocks import *

import math

import numpy as np

from MelnikovCert.contour import build_gamma
from MelnikovCert.crtbp import PlanarCRTBP, SpatialCRTBP, orbit_of, planar_h5, resonant_actions
from MelnikovCert.kepler_core import KeplerOrbit, k1
from MelnikovCert.melnikov import (ERROR_FLOOR, ContourParams, GenericSystem, MelnikovResult, melnikov_generic, melnikov_planar_raw,
                                   melnikov_spatial, sign_consistency, small_circle, top_segment_asymptotic, top_segment_leading,
                                   top_segment_numeric, vertical_legs)
from MelnikovCert.variational import detect_resonance


class TestMelnikovPlanar(unittest.TestCase):
	def test_forms_agree(self):
		for e in (0.2, 0.5, 0.8):
			for mu in (0.1, 0.5):
				for theta2 in (0.0, math.pi/3, 3*math.pi/5):
					simplified = planar_result(e, mu, theta2).value[0]
					raw = melnikov_planar_raw(e, mu, 1.0, theta2).value[0]

					self.assertLess(abs(raw - simplified), 1e-6*max(1.0, abs(simplified)), f'Raw and simplified forms should agree at e={e}, mu={mu}, theta2={theta2}: {raw} != {simplified}')

	def test_sign_consistency(self):
		report = sign_consistency(0.5, 0.3, 1.0, 0.4)

		self.assertEqual(report.consistent_sign, -1, f'The anomaly form should need the minus sign: {report}')

	def test_half_turn_invariance(self):
		for theta2 in (0.2, 1.1):
			a = planar_result(0.5, 0.3, theta2).value[0]
			b = planar_result(0.5, 0.3, theta2 + math.pi).value[0]

			self.assertLess(abs(a - b), 1e-8*max(1.0, abs(a)), f'Shifting theta2 by pi should not change the integral: {a} != {b}')

	def test_nonzero(self):
		for e in (0.2, 0.5, 0.8):
			results = [planar_result(e, 0.3, theta2) for theta2 in THETA_GRID]

			self.assertTrue(any(r.nonzero_verdict for r in results), f'Some angle should give a certified nonzero integral at e={e}: {results}')

	def test_verdict_stable(self):
		theta2 = THETA_GRID[1]
		base = planar_result(0.5, 0.3, theta2)
		finer = planar_result(0.5, 0.3, theta2, ContourParams(tol=1e-11))

		self.assertEqual(base.nonzero_verdict, finer.nonzero_verdict, f'The verdict should not depend on the tolerance: {base} {finer}')

	def test_deformation_invariance(self):
		theta2 = 0.7
		base = planar_result(0.5, 0.3, theta2).value[0]
		for params in (ContourParams(delta_factor=0.1), ContourParams(bigm_factor=20.0)):
			other = planar_result(0.5, 0.3, theta2, params).value[0]

			self.assertLess(abs(other - base), 1e-6*max(1.0, abs(base)), f'Deforming the loop with {params} should not change the integral: {other} != {base}')

	def test_legs_do_not_cancel(self):
		rising, falling = vertical_legs(0.5, 0.3, 1.0, 0.7)

		self.assertGreater(abs(rising + falling), 1e-6, f'The continued integrand is not periodic, so the legs should not cancel: {rising} {falling}')

	def test_spatial_matches_planar(self):
		for e in (0.2, 0.5, 0.8):
			for theta in THETA_GRID:
				planar = planar_result(e, 0.3, theta).value[0]
				spatial = melnikov_spatial(e, 0.3, 1.0, theta).value[0]

				self.assertLess(abs(spatial - planar), 1e-6*max(1.0, abs(planar)), f'The equatorial spatial integral should match the planar one at e={e}: {spatial} != {planar}')

	def test_small_circle(self):
		result = small_circle(0.5, 0.3, 1.0, 0.4, turns=2)

		self.assertLess(result.magnitude, 1e-4, f'Two turns around the singular time should contribute nothing: {result}')

	def test_top_segment_leading_log(self):
		orbit = KeplerOrbit.resonant(0.5, 0.3)
		for M in (5.0, 50.0):
			linear = top_segment_leading(0.5, 0.4, M)
			full = top_segment_leading(0.5, 0.4, M, orbit)
			z = orbit.omega1*M

			self.assertAlmostEqual(full - linear, -linear*math.log(z)/z, delta=1e-12*abs(linear), msg=f'The orbit should add the logarithmic term at M={M}.')

	def test_top_segment_sweep(self):
		sweep = (5, 10, 20, 40)
		for e in (0.2, 0.5):
			orbit = KeplerOrbit.resonant(e, 0.3)
			k = k1(e)/orbit.omega1
			for theta2 in (0.0, math.pi/4):
				numeric = {m: top_segment_numeric(e, 0.3, 1.0, theta2, M=m*k) for m in sweep}
				growth = abs(top_segment_leading(e, theta2, 40*k, orbit) - top_segment_leading(e, theta2, 40*k) - top_segment_leading(e, theta2, 5*k, orbit) + top_segment_leading(e, theta2, 5*k))
				linear = {m: numeric[m] - top_segment_leading(e, theta2, m*k) for m in sweep}
				corrected = {m: numeric[m] - top_segment_leading(e, theta2, m*k, orbit) for m in sweep}
				remainder = {m: numeric[m] - top_segment_asymptotic(e, 0.3, 1.0, theta2, M=m*k) for m in sweep}

				self.assertGreater(abs(linear[40] - linear[5]), 0.5*growth, f'Without the logarithm the remainder should drift at e={e}, theta2={theta2}: {linear}')
				self.assertLess(abs(corrected[40] - corrected[20]), 0.25*growth, f'With the logarithm the remainder should settle at e={e}, theta2={theta2}: {corrected}')
				for m in (20, 40):
					self.assertLess(abs(remainder[m]), 0.25*growth, f'The pole expansion should leave an O(1/M) remainder at e={e}, theta2={theta2}, M={m}k: {remainder}')

	def test_result_margin(self):
		zero = MelnikovResult(np.zeros(1, dtype=complex), (0.0,), None, 1e-12)
		exact = MelnikovResult(np.ones(1, dtype=complex), (0.0,), None, 0.0)

		self.assertFalse(zero.nonzero_verdict, f'A zero value should never be certified nonzero: {zero}')
		self.assertTrue(exact.nonzero_verdict, f'An exact nonzero value should be certified: {exact}')
		self.assertTrue(math.isfinite(exact.margin), f'A vanishing error estimate should be floored: {exact.margin}')
		self.assertLessEqual(exact.margin, 1/ERROR_FLOOR, f'The margin should not exceed the floor: {exact.margin}')


class TestGenericSystem(unittest.TestCase):
	def setUp(self):
		self.res = detect_resonance([1.0])
		self.gamma = build_gamma(self.res.T_star, 1.0, 0.1, 3.0)

	def test_zero_coefficients(self):
		system = zero_system(1, 1)
		result = melnikov_generic(system, detect_resonance([1.0], I_star=[1.0], d_omega=[[1.0]]), [0.3], self.gamma)

		self.assertTrue(np.all(result.value == 0), f'Vanishing coefficients should give a vanishing integral: {result}')

	def test_entire_coefficients(self):
		res = detect_resonance([1.0], I_star=[1.0], d_omega=[[2.0]])
		result = melnikov_generic(trig_system(), res, [0.3], self.gamma)

		self.assertLess(result.magnitude, 1e-8, f'Entire coefficients should integrate to zero around a closed loop: {result}')

	def test_registry(self):
		self.assertIs(GenericSystem.for_type('crtbp-planar'), PlanarCRTBP, 'The planar CRTBP should be registered.')
		self.assertIs(GenericSystem.for_type('crtbp-spatial'), SpatialCRTBP, 'The spatial CRTBP should be registered.')
		with self.assertRaises(NameError, msg='Unknown systems should be rejected.'):
			GenericSystem.for_type('pendulum')

	def test_periodicity_check(self):
		system = trig_system()
		system.h_k = lambda I, theta: np.cos(theta/2)
		with self.assertRaises(ValueError, msg='Coefficients of period 4 pi should fail the check.'):
			system.check_periodicity(np.ones(1))
		PlanarCRTBP.build(0.3).check_periodicity(resonant_actions(0.5, 0.3))

	def test_crtbp_actions(self):
		orbit = orbit_of(resonant_actions(0.5, 0.3), 0.3)

		self.assertAlmostEqual(orbit.e, 0.5, places=12, msg=f'The actions should map back to the resonant orbit: {orbit}')
		self.assertAlmostEqual(orbit.omega1, 0.7, places=12, msg=f'The mean motion of the torus should be 1 - mu: {orbit}')

	def test_crtbp_real_coefficients(self):
		theta = np.array([[0.0, 1.0, 2.5], [0.2, 0.2, 0.2]])
		values = planar_h5(resonant_actions(0.5, 0.3), theta, 0.3)

		self.assertEqual(values.shape, (2, 3), f'h_5 should have one row per action: {values.shape}')
		self.assertTrue(np.all(np.isfinite(values)), f'h_5 should be finite at real angles: {values}')

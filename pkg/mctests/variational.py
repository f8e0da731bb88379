import unittest

from .mocks import *

import math

import numpy as np

from MelnikovCert.contour import build_circle, build_gamma, build_segment_path
from MelnikovCert.crtbp import PlanarCRTBP, SpatialCRTBP, resonant_actions
from MelnikovCert.kepler_core import KeplerOrbit
from MelnikovCert.melnikov import ContourParams, melnikov_generic
from MelnikovCert.variational import (NotResonant, Verdict, certify_nonintegrability, crtbp_resonance, detect_resonance,
                                      fundamental_matrix, monodromy_gamma, monodromy_period, resonance_for, rve_matrix)


class TestResonance(unittest.TestCase):
	def test_integer_frequencies(self):
		res = detect_resonance([2, 3])

		self.assertEqual(res.omega_star, 1.0, f'(2, 3) should have base frequency 1: {res}')
		self.assertEqual(res.k_vec.tolist(), [2, 3], f'(2, 3) should have k = (2, 3): {res}')
		self.assertAlmostEqual(res.T_star*res.omega_star, 2*math.pi, places=14, msg=f'T* should be 2 pi / omega*: {res}')

	def test_rational_frequencies(self):
		res = detect_resonance([0.7, 0.0])

		self.assertAlmostEqual(res.omega_star, 0.7, places=14, msg=f'(0.7, 0) should have base frequency 0.7: {res}')
		self.assertEqual(res.k_vec.tolist(), [1, 0], f'(0.7, 0) should have k = (1, 0): {res}')
		self.assertEqual(detect_resonance([0.4, 0.6]).k_vec.tolist(), [2, 3], '(0.4, 0.6) should have k = (2, 3).')

	def test_not_resonant(self):
		res = detect_resonance([1.0, math.sqrt(2)])

		self.assertIs(res, NotResonant, f'(1, sqrt 2) should not be resonant: {res}')
		self.assertFalse(res, 'NotResonant should be falsy.')
		with self.assertRaises(ValueError, msg='A vanishing frequency vector should be rejected.'):
			detect_resonance([0.0, 0.0])

	def test_subdivide(self):
		res = detect_resonance([2, 3]).subdivide(3)

		self.assertEqual(res.k_vec.tolist(), [6, 9], f'Subdividing should scale k: {res}')
		self.assertTrue(np.allclose(res.omega, [2, 3]), f'Subdividing should keep the frequencies: {res}')
		self.assertAlmostEqual(res.T_star, 6*math.pi, places=12, msg=f'Subdividing should stretch T*: {res}')

	def test_crtbp_resonance(self):
		system = PlanarCRTBP.build(0.3)
		res = resonance_for(system, resonant_actions(0.5, 0.3), subdivide=3)
		orbit = KeplerOrbit.resonant(0.5, 0.3)

		self.assertEqual(res.k_vec.tolist(), [3, 0], f'The planar torus should have k = (3, 0): {res}')
		self.assertAlmostEqual(res.T_star, 3*orbit.period, places=10, msg=f'T* should hold three orbital periods: {res}')
		self.assertAlmostEqual(res.d_omega[0, 0], -2.1, places=12, msg=f'D omega should be -3(1 - mu)/I1^4: {res}')
		direct = crtbp_resonance(orbit, 3)
		self.assertTrue(np.allclose(direct.d_omega, res.d_omega), f'Both resonance routes should agree: {direct} {res}')


class TestFundamentalMatrix(unittest.TestCase):
	def setUp(self):
		self.system = trig_system()
		self.res = detect_resonance([1.0], I_star=[1.0], d_omega=[[2.0]])
		self.theta = [0.4]

	def test_identity_at_zero(self):
		data = fundamental_matrix(self.system, self.res, self.theta, 0)

		self.assertTrue(np.array_equal(data.matrix, np.eye(3)), f'Phi(0) should be the identity: {data.matrix}')

	def test_closed_form(self):
		theta = self.theta[0]
		for t in (1.3, 2.0 + 0.7j):
			data = fundamental_matrix(self.system, self.res, self.theta, t, tol=1e-12)
			xi = np.sin(t + theta) - np.sin(theta)
			psi = 3*(np.cos(theta) - np.cos(t + theta)) - 2*t*np.sin(theta)

			self.assertAlmostEqual(data.Xi_k[0], xi, delta=1e-10, msg=f'Xi at t={t} should be sin(t + theta) - sin(theta).')
			self.assertAlmostEqual(data.Psi_k[0], psi, delta=1e-10, msg=f'Psi at t={t} should match the closed form.')
			self.assertEqual(data.element.C3[0, 0], 2.0*t, f'The coupling block should be D omega t exactly.')

	def test_variational_equation(self):
		h = 1e-4
		for system, res, theta, t in (
			(self.system, self.res, self.theta, 1.3),
			(PlanarCRTBP.build(0.3), crtbp_resonance(KeplerOrbit.resonant(0.5, 0.3), 3), [0.0, 0.7], 1.0),
		):
			derivative = (fundamental_matrix(system, res, theta, t + h, tol=1e-12).matrix - fundamental_matrix(system, res, theta, t - h, tol=1e-12).matrix)/(2*h)
			expected = rve_matrix(system, res, theta, t) @ fundamental_matrix(system, res, theta, t, tol=1e-12).matrix
			residual = np.max(np.abs(derivative - expected))

			self.assertLess(residual, 1e-6*max(1.0, np.max(np.abs(expected))), f'Phi should solve the variational equation for {system}: residual {residual}')


class TestMonodromy(unittest.TestCase):
	def setUp(self):
		self.res = detect_resonance([1.0], I_star=[1.0], d_omega=[[2.0]])
		self.gamma = build_gamma(self.res.T_star, 1.0, 0.1, 3.0)

	def test_contractible_loop(self):
		for loop in (self.gamma, build_circle(1 + 1j, 0.5)):
			element, error = monodromy_gamma(trig_system(), self.res, [0.4], loop)

			self.assertLess(np.max(np.abs(element.C1)), 1e-8, f'Entire coefficients should give no action monodromy on {loop}.')
			self.assertLess(np.max(np.abs(element.C2)), 1e-8, f'Entire coefficients should give no angle monodromy on {loop}.')
			self.assertTrue(np.all(element.C3 == 0), 'The loop monodromy should have no coupling block.')

	def test_open_path(self):
		with self.assertRaises(ValueError, msg='Monodromy should need a closed loop.'):
			monodromy_gamma(trig_system(), self.res, [0.4], build_segment_path([0, 1]))

	def test_period_coupling(self):
		element, _ = monodromy_period(zero_system(1, 1, d_omega=lambda I: np.array([[2.0]])), self.res, [0.0])

		self.assertTrue(np.all(element.C1 == 0), f'Vanishing coefficients should give no action drift: {element}')
		self.assertEqual(element.C3[0, 0], 2.0*self.res.T_star, f'The coupling block should be D omega T*: {element}')

	def test_crtbp_period_coupling(self):
		orbit = KeplerOrbit.resonant(0.5, 0.3)
		res = crtbp_resonance(orbit, 3)
		element, _ = monodromy_period(PlanarCRTBP.build(0.3), res, [0.0, 0.7])

		self.assertTrue(np.array_equal(element.C3, res.d_omega*res.T_star), f'C3 should be diag(-3(1 - mu)/I1^4, 0) T*: {element.C3}')
		self.assertEqual(element.C3[1, 1], 0.0, 'The second action should not couple.')

	def test_crtbp_matches_melnikov(self):
		orbit = KeplerOrbit.resonant(0.5, 0.3)
		res = crtbp_resonance(orbit, 3)
		gamma = ContourParams().to_gamma(orbit)
		generic = melnikov_generic(PlanarCRTBP.build(0.3), res, [0.0, 0.7], gamma).value[0]
		planar = planar_result(0.5, 0.3, 0.7).value[0]

		self.assertLess(abs(generic - planar), 1e-6*max(1.0, abs(planar)), f'The generic and planar integrals should agree: {generic} != {planar}')


class TestCertificate(unittest.TestCase):
	def setUp(self):
		self.orbit = KeplerOrbit.resonant(0.5, 0.3)
		self.gamma = ContourParams().to_gamma(self.orbit)
		self.theta = max(THETA_GRID, key=lambda theta: planar_result(0.5, 0.3, theta).margin)

	def test_zero_coefficients(self):
		system = zero_system(2, 2)
		res = resonance_for(system, np.ones(2))
		gamma = build_gamma(res.T_star, 1.0, 0.1, 3.0)
		certificate = certify_nonintegrability(system, res, [0.0, 0.0], gamma)

		self.assertEqual(certificate.verdict, Verdict.INCONCLUSIVE, f'Vanishing coefficients should never certify: {certificate}')

	def test_flat_frequencies(self):
		system = PlanarCRTBP.build(0.3)
		res = crtbp_resonance(self.orbit, 3)
		res.d_omega = np.zeros_like(res.d_omega)
		certificate = certify_nonintegrability(system, res, [0.0, self.theta], self.gamma)

		self.assertEqual(certificate.verdict, Verdict.INCONCLUSIVE, f'A vanishing D omega should never certify: {certificate}')

	def test_planar_positive(self):
		certificate = certify_nonintegrability(PlanarCRTBP.build(0.3), crtbp_resonance(self.orbit, 3), [0.0, self.theta], self.gamma)

		self.assertEqual(certificate.verdict, Verdict.POSITIVE, f'The planar CRTBP should be certified at e=0.5, mu=0.3: {certificate}')
		self.assertTrue(all(margin > 10 for margin in certificate.margins.values()), f'Both margins should exceed ten: {certificate.margins}')

	def test_spatial_positive(self):
		res = crtbp_resonance(self.orbit, 3, spatial=True)
		certificate = certify_nonintegrability(SpatialCRTBP.build(0.3), res, [0.0, 0.0, self.theta], self.gamma)

		self.assertEqual(certificate.verdict, Verdict.POSITIVE, f'The spatial CRTBP should be certified on the equatorial family: {certificate}')

	def test_subdivision_invariance(self):
		verdicts = {
			n: certify_nonintegrability(PlanarCRTBP.build(0.3), crtbp_resonance(self.orbit, n), [0.0, self.theta], self.gamma).verdict
			for n in (1, 2, 3)
		}

		self.assertEqual(len(set(verdicts.values())), 1, f'The verdict should not depend on the subdivision: {verdicts}')


class TestCertificateEccentricities(unittest.TestCase):
	def test_grid_ends(self):
		for e in (0.2, 0.8):
			orbit = KeplerOrbit.resonant(e, 0.3)
			gamma = ContourParams().to_gamma(orbit)
			theta = max(THETA_GRID, key=lambda theta: planar_result(e, 0.3, theta).margin)
			planar_res = crtbp_resonance(orbit, 3)
			spatial_res = crtbp_resonance(orbit, 3, spatial=True)
			planar = certify_nonintegrability(PlanarCRTBP.build(0.3), planar_res, [0.0, theta], gamma)
			spatial = certify_nonintegrability(SpatialCRTBP.build(0.3), spatial_res, [0.0, 0.0, theta], gamma)

			self.assertTrue(np.array_equal(planar.C3_bar, planar_res.d_omega*planar_res.T_star), f'C3 should be D omega T* exactly at e={e}: {planar.C3_bar}')
			self.assertTrue(np.array_equal(spatial.C3_bar, spatial_res.d_omega*spatial_res.T_star), f'The spatial C3 should be D omega T* exactly at e={e}: {spatial.C3_bar}')
			for certificate in (planar, spatial):
				self.assertEqual(certificate.verdict, Verdict.POSITIVE, f'The {certificate.system} problem should be certified at e={e}: {certificate}')
				self.assertTrue(all(margin > 10 for margin in certificate.margins.values()), f'Both margins should exceed ten at e={e}: {certificate.margins}')

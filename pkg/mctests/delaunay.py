import unittest

from .mocks import *

import math

import numpy as np

from MelnikovCert.delaunay import (DelaunayActions, DomainError, chi, chi1, chi2, chi_integrand, colatitude_state, dchi2_dr,
                                   dhat_chi2_dpsi, eccentricity, eval_h_hat1, h_bracket, h_hat1_from_state, hat_chi, hat_chi2,
                                   hat_chi3, planar_state, psi0, radial_period, solve_Psi, solve_R, spatial_state,
                                   state_from_anomaly, state_from_radius, turning_points)
from MelnikovCert.kepler_core import KeplerOrbit, radius_of_phi, true_anomaly_of_mean


class TestDelaunayRadial(unittest.TestCase):
	I1, I2, mu = 1.0, 0.7, 0.2

	def setUp(self):
		self.tp = turning_points(self.I1, self.I2, self.mu)
		self.r = np.linspace(self.tp.r_minus, self.tp.r_plus, 11)[1:-1]

	def test_turning_points(self):
		self.assertAlmostEqual(chi(self.tp.r_minus, self.I1, self.I2, self.mu), 0.0, places=12, msg='chi should vanish at r_minus.')
		half = math.pi*(self.I1*math.sqrt(1 - self.mu) - self.I2)
		self.assertAlmostEqual(chi(self.tp.r_plus, self.I1, self.I2, self.mu), half, places=12, msg=f'chi(r_plus) should be {half}.')

	def test_chi_derivative(self):
		h = 1e-6
		numeric = (chi(self.r + h, self.I1, self.I2, self.mu) - chi(self.r - h, self.I1, self.I2, self.mu))/(2*h)
		exact = chi_integrand(self.r, self.I1, self.I2, self.mu)

		self.assertLess(np.max(np.abs(numeric - exact)), 1e-7, f'dchi/dr should be the radial momentum: {numeric} != {exact}')

	def test_action_partials(self):
		h = 1e-6
		d1 = (chi(self.r, self.I1 + h, self.I2, self.mu) - chi(self.r, self.I1 - h, self.I2, self.mu))/(2*h)
		d2 = (chi(self.r, self.I1, self.I2 + h, self.mu) - chi(self.r, self.I1, self.I2 - h, self.mu))/(2*h)

		self.assertLess(np.max(np.abs(d1 - chi1(self.r, self.I1, self.I2, self.mu))), 1e-6, 'chi1 should be the I1 partial of chi.')
		self.assertLess(np.max(np.abs(d2 - chi2(self.r, self.I1, self.I2, self.mu))), 1e-6, 'chi2 should be the I2 partial of chi.')

	def test_incoming_sheet(self):
		half = chi(self.tp.r_plus, self.I1, self.I2, self.mu)
		outgoing = chi(self.r, self.I1, self.I2, self.mu)
		incoming = chi(self.r, self.I1, self.I2, self.mu, sheet=-1)

		self.assertLess(np.max(np.abs(incoming - (2*half - outgoing))), 1e-12, 'The incoming sheet should mirror the outgoing one.')

	def test_solve_R(self):
		period = radial_period(self.mu)
		theta1 = np.linspace(0, 2*period, 101)
		R = solve_R(theta1, self.I1, self.I2, self.mu)
		sheet = np.where(np.mod(theta1, period) <= period/2, 1, -1)
		d = np.mod(chi1(R, self.I1, self.I2, self.mu, sheet) - theta1, period)
		residual = np.max(np.minimum(d, period - d))

		self.assertLess(residual, 1e-9, f'chi1(R(theta1)) should return theta1, residual {residual}.')

	def test_planar_state_rates(self):
		h = 1e-6
		theta1 = np.array([0.4, 1.3, 2.9, 4.1])
		state = planar_state(theta1, self.I1, self.I2, self.mu)
		plus = planar_state(theta1 + h, self.I1, self.I2, self.mu)
		minus = planar_state(theta1 - h, self.I1, self.I2, self.mu)

		self.assertLess(np.max(np.abs((plus.R - minus.R)/(2*h) - state.dR_dtheta1)), 1e-6, 'dR/dtheta1 should match R(theta1).')
		self.assertLess(np.max(np.abs((plus.chi2 - minus.chi2)/(2*h) - state.chi2_rate)), 1e-6, 'chi2_rate should match chi2(theta1).')
		chain = dchi2_dr(state.R, self.I1, self.I2, self.mu, np.where(theta1 < radial_period(self.mu)/2, 1, -1))*state.dR_dtheta1
		self.assertLess(np.max(np.abs(chain - state.chi2_rate)), 1e-10, 'chi2_rate should be the chain rule product.')

	def test_chi2_continuous(self):
		theta1 = np.linspace(0.01, 3*radial_period(self.mu), 1200)
		values = planar_state(theta1, self.I1, self.I2, self.mu).chi2

		self.assertTrue(np.all(np.diff(values) < 0), 'The unwrapped chi2 should decrease monotonically.')
		self.assertLess(np.max(np.abs(np.diff(values))), 0.2, 'The unwrapped chi2 should have no jumps.')

	def test_anomaly_state_matches(self):
		e = 0.5
		I2 = math.sqrt(1 - e**2)
		orbit = KeplerOrbit(0.0, e, I2)
		theta1 = np.linspace(0.1, 12.0, 23)
		expected = planar_state(theta1, 1.0, I2)
		actual = state_from_anomaly(orbit, true_anomaly_of_mean(theta1, e))

		for name in ('R', 'dR_dtheta1', 'chi2', 'chi2_rate'):
			difference = np.max(np.abs(getattr(actual, name) - getattr(expected, name)))
			self.assertLess(difference, 1e-10, f'{name} from the anomaly should match the Delaunay closed form, off by {difference}.')

	def test_orbit_identities(self):
		theta1 = np.linspace(0.1, 2*radial_period(self.mu), 41)
		state = planar_state(theta1, self.I1, self.I2, self.mu)
		e = eccentricity(self.I1, self.I2, self.mu)
		ellipse = self.I2**2/((1 - self.mu)*(1 + e*np.cos(-state.chi2)))

		self.assertLess(np.max(np.abs(state.R - ellipse)), 1e-8, 'R should lie on the ellipse at true anomaly -chi2.')
		self.assertAlmostEqual(chi1(self.tp.r_plus, self.I1, self.I2, self.mu), radial_period(self.mu)/2, places=12, msg='chi1 should reach half the radial period at r_plus.')

	def test_radial_period(self):
		period = radial_period(self.mu)
		theta1 = np.linspace(0.1, 5.0, 19)
		state = planar_state(theta1, self.I1, self.I2, self.mu)
		shifted = planar_state(theta1 + period, self.I1, self.I2, self.mu)
		naive = planar_state(theta1 + 2*math.pi, self.I1, self.I2, self.mu)

		self.assertAlmostEqual(period, 2*math.pi*math.sqrt(1 - self.mu), places=14, msg=f'The radial period should be 2 pi sqrt(1 - mu): {period}')
		self.assertLess(np.max(np.abs(shifted.R - state.R)), 1e-10, 'R should repeat after one radial period.')
		self.assertLess(np.max(np.abs(shifted.chi2 - state.chi2 + 2*math.pi)), 1e-10, 'chi2 should drop by 2 pi per radial period.')
		self.assertGreater(np.max(np.abs(naive.R - state.R)), 1e-2, 'R should not repeat after 2 pi when mu > 0.')

	def test_radius_state_matches_anomaly(self):
		orbit = KeplerOrbit.resonant(0.5, 0.3)
		phi = np.array([complex(x, y) for x in (0.5, 1.5, 2.5, 4.0, -2.0) for y in (0.3, -0.8)])
		expected = state_from_anomaly(orbit, phi)
		actual = state_from_radius(orbit, radius_of_phi(orbit, phi), phi)

		for name in ('R', 'dR_dtheta1', 'chi2', 'chi2_rate'):
			reference = getattr(expected, name)
			difference = np.max(np.abs(getattr(actual, name) - reference)/np.maximum(1.0, np.abs(reference)))
			self.assertLess(difference, 1e-9, f'{name} from the continued radius should match the anomaly form, off by {difference}.')

	def test_radius_state_real(self):
		orbit = KeplerOrbit.resonant(0.5, 0.3)
		phi = true_anomaly_of_mean(np.linspace(0.1, 12.0, 23), 0.5)
		state = state_from_radius(orbit, radius_of_phi(orbit, phi), phi)

		self.assertFalse(np.iscomplexobj(state.chi2_rate), 'Real anomalies should give a real state.')
		self.assertLess(np.max(np.abs(state.chi2 + phi)), 1e-9, 'chi2 should follow the unwrapped anomaly.')

	def test_domain_errors(self):
		with self.assertRaises(DomainError, msg='Radii beyond r_plus should be rejected.'):
			chi(1.1*self.tp.r_plus, self.I1, self.I2, self.mu)
		with self.assertRaises(DomainError, msg='The anomaly of a circular orbit is undefined.'):
			chi2(1.0, 1.0, 1.0)
		with self.assertRaises(DomainError, msg='Actions without turning points should be rejected.'):
			DelaunayActions(1.0, 1.5)
		with self.assertRaises(DomainError, msg='|I3| > |I2| should be rejected.'):
			DelaunayActions(1.0, 0.5, 0.6)


class TestDelaunayColatitude(unittest.TestCase):
	I2, I3 = 1.0, 0.5

	def setUp(self):
		self.psi = np.array([0.7, 1.0, 1.3, 2.0, 2.4])

	def test_psi0(self):
		self.assertAlmostEqual(psi0(self.I2, self.I3), math.pi/6, places=14, msg='psi0 should be asin(I3/I2).')
		self.assertAlmostEqual(hat_chi(psi0(self.I2, self.I3), self.I2, self.I3), 0.0, places=12, msg='hat_chi should vanish at psi0.')

	def test_equator(self):
		self.assertAlmostEqual(psi0(1.0, 1.0), math.pi/2, places=14, msg='psi0 should be pi/2 on the equator.')
		self.assertAlmostEqual(hat_chi(math.pi/2, 1.0, 1.0), 0.0, places=12, msg='hat_chi should vanish on the equator.')
		with self.assertRaises(DomainError, msg='The colatitude angles should be rejected on the equator.'):
			hat_chi2(math.pi/2, 1.0, 1.0)

	def test_partials(self):
		h = 1e-6
		d2 = (hat_chi(self.psi, self.I2 + h, self.I3) - hat_chi(self.psi, self.I2 - h, self.I3))/(2*h)
		d3 = (hat_chi(self.psi, self.I2, self.I3 + h) - hat_chi(self.psi, self.I2, self.I3 - h))/(2*h)

		self.assertLess(np.max(np.abs(d2 - hat_chi2(self.psi, self.I2, self.I3))), 1e-7, 'hat_chi2 should be the I2 partial.')
		self.assertLess(np.max(np.abs(d3 - hat_chi3(self.psi, self.I2, self.I3))), 1e-7, 'hat_chi3 should be the I3 partial.')

	def test_homogeneity(self):
		euler = self.I2*hat_chi2(self.psi, self.I2, self.I3) + self.I3*hat_chi3(self.psi, self.I2, self.I3)

		self.assertLess(np.max(np.abs(euler - hat_chi(self.psi, self.I2, self.I3))), 1e-12, 'hat_chi should be homogeneous of degree one.')

	def test_psi_derivative(self):
		h = 1e-6
		numeric = (hat_chi2(self.psi + h, self.I2, self.I3) - hat_chi2(self.psi - h, self.I2, self.I3))/(2*h)

		self.assertLess(np.max(np.abs(numeric - dhat_chi2_dpsi(self.psi, self.I2, self.I3))), 1e-7, 'dhat_chi2/dpsi should match.')

	def test_solve_Psi(self):
		I1, I2, I3, mu = 1.0, 0.7, 0.4, 0.2
		theta1 = np.linspace(0.1, 5.0, 17)
		for theta2 in (0.0, 1.0, 4.0):
			Psi = solve_Psi(theta1, theta2, I1, I2, I3, mu)
			state = planar_state(theta1, I1, I2, mu)
			tau = np.mod(theta2 - state.chi2, 2*math.pi)
			sheet = np.where(tau <= math.pi, 1, -1)
			d = np.mod(hat_chi2(Psi, I2, I3, sheet) + state.chi2 - theta2, 2*math.pi)
			# arccos loses half its digits next to the turning points
			well_posed = np.abs(np.sin(tau)) > 0.05

			self.assertLess(np.max(np.minimum(d, 2*math.pi - d)[well_posed]), 1e-9, f'Psi should solve the colatitude equation at theta2={theta2}.')

	def test_colatitude_rates(self):
		I1, I2, I3, mu = 1.0, 0.7, 0.4, 0.2
		h = 1e-5
		theta1 = np.linspace(0.1, 5.0, 29)

		def state(t, theta2):
			return colatitude_state(planar_state(t, I1, I2, mu), t, theta2, I1, I2, I3, mu)
		for theta2 in (0.0, 1.0, 4.0):
			middle, plus, minus = state(theta1, theta2), state(theta1 + h, theta2), state(theta1 - h, theta2)
			tau = np.mod(theta2 - middle.planar.chi2, 2*math.pi)
			well_posed = np.abs(np.sin(tau)) > 0.05
			dPsi = (plus.Psi - minus.Psi)/(2*h)
			rate = (plus.hat_chi3 - minus.hat_chi3)/(2*h)

			self.assertLess(np.max(np.abs(dPsi - middle.dPsi_dtheta1)[well_posed]), 1e-5, f'dPsi/dtheta1 should match Psi(theta1) at theta2={theta2}.')
			self.assertLess(np.max(np.abs(rate - middle.chi3_rate)[well_posed]), 1e-5, f'chi3_rate should match hat_chi3(theta1) at theta2={theta2}.')

	def test_spatial_routes_agree(self):
		I1, I2, mu = 1.0, 0.7, 0.2
		e = eccentricity(I1, I2, mu)
		orbit = KeplerOrbit(mu, e, I2)
		for theta1 in (0.4, 1.7, 3.1, 4.6):
			for theta2, theta3 in ((0.0, 0.8), (1.2, 2.0)):
				phi = true_anomaly_of_mean(theta1/math.sqrt(1 - mu), e)
				state = spatial_state(orbit, phi, theta2)
				closed = math.sqrt(1 - mu)*eval_h_hat1((I1, I2, I2), (theta1, theta2, theta3), mu)
				continued = h_hat1_from_state(state, theta3)

				self.assertEqual(state.Psi, solve_Psi(theta1, theta2, I1, I2, I2, mu), f'Psi should come from the colatitude solve at theta1={theta1}.')
				self.assertAlmostEqual(continued, closed, delta=1e-9*max(1.0, abs(closed)), msg=f'The anomaly route should match the Delaunay route at theta1={theta1}, theta2={theta2}.')

	def test_solve_Psi_equatorial(self):
		Psi = solve_Psi(np.linspace(0, 3, 5), 0.4, 1.0, 0.7, 0.7, 0.2)

		self.assertTrue(np.all(Psi == math.pi/2), f'Psi should be pi/2 on the equatorial family: {Psi}')

	def test_spatial_reduces_to_planar(self):
		I1, I2, mu = 1.0, 0.7, 0.2
		theta1, theta2, theta3 = 1.0, 0.3, 0.8
		spatial = eval_h_hat1((I1, I2, I2), (theta1, theta2, theta3), mu)
		planar = h_bracket(planar_state(theta1, I1, I2, mu), theta2 + theta3)

		self.assertAlmostEqual(spatial, planar, places=12, msg=f'The equatorial h_hat1 should reduce to the planar bracket.')

	def test_spatial_near_equator(self):
		I1, I2, mu = 1.0, 0.7, 0.2
		theta1, theta3 = 1.0, 0.8
		theta2 = float(planar_state(theta1, I1, I2, mu).chi2) + 1.0
		equatorial = eval_h_hat1((I1, I2, I2), (theta1, theta2, theta3), mu)
		nearby = eval_h_hat1((I1, I2, I2*(1 - 1e-10)), (theta1, theta2, theta3), mu)

		self.assertLess(abs(nearby - equatorial), 1e-4*max(1.0, abs(equatorial)), f'h_hat1 should be continuous at the equator: {nearby} != {equatorial}')

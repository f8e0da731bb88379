import unittest

from .mocks import *

import numpy as np
from hypothesis import given, settings, strategies as st

from MelnikovCert.variational import UnipotentElement, commutes, unipotent_inverse, unipotent_power, unipotent_product

entries = st.integers(min_value=-5, max_value=5)


def _block(draw, *shape):
	size = int(np.prod(shape))
	return np.array(draw(st.lists(entries, min_size=size, max_size=size)), dtype=float).reshape(shape)


@st.composite
def elements(draw, count=2):
	ell = draw(st.integers(min_value=1, max_value=3))
	m = draw(st.integers(min_value=1, max_value=3))
	return [UnipotentElement(_block(draw, ell), _block(draw, m), _block(draw, m, ell)) for _ in range(count)]


class TestUnipotentAlgebra(unittest.TestCase):
	@settings(max_examples=4000, deadline=None)
	@given(elements())
	def test_product_matches_matrices(self, pair):
		a, b = pair
		product = unipotent_product(a, b)

		self.assertTrue(np.array_equal(product.as_matrix(), a.as_matrix() @ b.as_matrix()), f'{a} @ {b} should match the dense product.')

	@settings(max_examples=3000, deadline=None)
	@given(elements(3))
	def test_associative(self, triple):
		a, b, c = triple

		self.assertEqual((a @ b) @ c, a @ (b @ c), f'The product should be associative for {triple}.')

	@settings(max_examples=1000, deadline=None)
	@given(elements(1), st.integers(min_value=-3, max_value=4))
	def test_power(self, single, k):
		a = single[0]
		expected = UnipotentElement.identity(a.ell, a.m)
		factor = a if k >= 0 else unipotent_inverse(a)
		for _ in range(abs(k)):
			expected = expected @ factor

		self.assertEqual(unipotent_power(a, k), expected, f'{a} ** {k} should match repeated products.')

	@settings(max_examples=1000, deadline=None)
	@given(elements(1))
	def test_inverse(self, single):
		a = single[0]
		identity = UnipotentElement.identity(a.ell, a.m)

		self.assertEqual(a @ unipotent_inverse(a), identity, f'{a} times its inverse should be the identity.')
		self.assertEqual(unipotent_inverse(a) @ a, identity, f'The inverse of {a} should also act on the left.')

	@settings(max_examples=1000, deadline=None)
	@given(elements())
	def test_commutes(self, pair):
		a, b = pair
		commutator = a.as_matrix() @ b.as_matrix() - b.as_matrix() @ a.as_matrix()

		self.assertEqual(commutes(a, b), not np.any(commutator), f'commutes() should agree with the dense commutator for {pair}.')

	def test_noncommuting_example(self):
		a = UnipotentElement([1.0], [0.0], [[1.0]])
		b = UnipotentElement([0.0], [0.0], [[1.0]])

		self.assertFalse(commutes(a, b), f'{a} and {b} should not commute.')
		self.assertTrue(commutes(a, UnipotentElement.identity(1, 1)), 'Everything should commute with the identity.')

	def test_shape_validation(self):
		with self.assertRaises(ValueError, msg='A coupling block of the wrong shape should be rejected.'):
			UnipotentElement(np.zeros(2), np.zeros(3), np.zeros((2, 3)))
		with self.assertRaises(ValueError, msg='Elements of different dimensions should not multiply.'):
			UnipotentElement.identity(1, 1) @ UnipotentElement.identity(2, 1)

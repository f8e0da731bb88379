import unittest

from .mocks import *

import math
import pathlib
import tempfile

import numpy as np

from MelnikovCert import cli
from MelnikovCert.commands import config_hash, do_gamma_dump, do_monodromy
from MelnikovCert import config as mcconfig
from MelnikovCert.contour import ContourPath
from MelnikovCert.fileio import FileIO
from MelnikovCert.kepler_core import KeplerOrbit
from MelnikovCert.melnikov import ContourParams
from MelnikovCert.variational import Certificate, UnipotentElement, Verdict


class TestArguments(unittest.TestCase):
	def test_theta_grid(self):
		self.assertEqual(cli.theta_grid('0'), [0.0], 'A lone 0 should be the angle zero, not a count.')
		self.assertEqual(cli.theta_grid(''), [], 'An empty grid should give no explicit angles.')
		self.assertEqual(cli.theta_grid('0,1.5'), [0.0, 1.5], 'A list should give explicit angles.')

	def test_even_angles(self):
		self.assertEqual(cli.even_angles(4), [0.0, math.pi/4, math.pi/2, 3*math.pi/4], 'A count should give evenly spaced angles.')
		self.assertEqual(cli.even_angles(0), [], 'A count of zero should give no angles.')

	def test_grid_resolution(self):
		self.assertEqual(mcconfig.setup(['melnikov', '--theta-grid', '0', '--jobs', '1']).theta_grid, [0.0], '--theta-grid 0 should be the single angle zero.')
		self.assertEqual(len(mcconfig.setup(['melnikov', '--n-theta', '3', '--jobs', '1']).theta_grid), 3, '--n-theta should set the number of angles.')
		self.assertEqual(mcconfig.setup(['melnikov', '--n-theta', '3', '--theta-grid', '0.5', '--jobs', '1']).theta_grid, [0.5], 'Explicit angles should override the count.')
		self.assertEqual(mcconfig.setup(['melnikov', '--n-theta', '0', '--jobs', '1']).theta_grid, [], 'A count of zero should give an empty grid.')

	def test_float_list(self):
		self.assertEqual(cli.float_list('0.2,0.5, 0.8'), [0.2, 0.5, 0.8], 'Comma-separated floats should be parsed.')
		with self.assertRaises(Exception, msg='Non-numeric lists should be rejected.'):
			cli.float_list('a,b')

	def test_str2bool(self):
		self.assertTrue(cli.str2bool('yes'), '"yes" should be true.')
		self.assertFalse(cli.str2bool('0'), '"0" should be false.')

	def test_defaults(self):
		config = mcconfig.setup(['k1-curve', '--jobs', '1'])

		self.assertEqual(config.mu, 0.3, f'The default mass ratio should be 0.3: {config.mu}')
		self.assertEqual(config.e, [0.5], f'The default eccentricity should be 0.5: {config.e}')
		self.assertEqual(len(config.theta_grid), 8, f'The default angle grid should have 8 angles: {config.theta_grid}')
		self.assertEqual((config.delta, config.big_m, config.side), (0.05, 10.0, 'left'), 'The default loop should be the left one.')
		self.assertEqual(config.jobs, 1, f'--jobs should be parsed: {config.jobs}')

	def test_common_args_after_command(self):
		config = mcconfig.setup(['melnikov', '--mu', '0.1', '--form', 'raw', '--e', '0.2,0.8', '--jobs', '2'])

		self.assertEqual(config.mu, 0.1, 'Section arguments should override the defaults.')
		self.assertEqual(config.e, [0.2, 0.8], 'Eccentricity lists should be parsed.')
		self.assertEqual(config.form, 'raw', 'Command arguments should be parsed.')
		self.assertEqual(config.jobs, 2, 'Root arguments should be accepted after the command.')

	def test_invalid(self):
		for args in (['melnikov', '--e', '1.5'], ['melnikov', '--delta', '20'], ['k1-curve', '--n', '1'], ['melnikov', '--n-theta', '-1'], []):
			with self.assertRaises(SystemExit, msg=f'{args} should be rejected.'):
				mcconfig.setup(args)


class TestCommands(unittest.TestCase):
	def setUp(self):
		self.tmp = tempfile.TemporaryDirectory()
		self.root = pathlib.Path(self.tmp.name)

	def tearDown(self):
		self.tmp.cleanup()

	def test_k1_curve(self):
		out = self.root.joinpath('k1.csv')
		config = mcconfig.setup(['k1-curve', '--e-min', '0.2', '--e-max', '0.8', '--n', '3', '--out', str(out)])
		config.func(config)
		rows = FileIO.load(out)

		self.assertEqual(list(rows[0].keys()), ['e', 'K1'], f'The curve should have the columns e,K1: {rows[0]}')
		self.assertEqual(len(rows), 3, f'The curve should have 3 rows: {rows}')
		self.assertAlmostEqual(float(rows[1]['K1']), 0.4509325, delta=1e-6, msg=f'K1(0.5) should be tabulated: {rows[1]}')

	def test_empty_grid(self):
		out = self.root.joinpath('empty.jsonl')
		config = mcconfig.setup(['melnikov', '--n-theta', '0', '--jobs', '1', '--out', str(out)])
		config.func(config)

		self.assertEqual(FileIO.load(out), [], 'An empty angle grid should write an empty file.')

	def test_melnikov_deterministic(self):
		outputs = []
		for name in ('a.jsonl', 'b.jsonl'):
			out = self.root.joinpath(name)
			config = mcconfig.setup(['melnikov', '--theta-grid', '0', '--jobs', '1', '--out', str(out)])
			config.func(config)
			outputs.append(out.read_bytes())
		records = FileIO.load(self.root.joinpath('a.jsonl'))

		self.assertEqual(outputs[0], outputs[1], 'Identical configurations should write identical files.')
		self.assertEqual(len(records), 1, f'One grid point should give one record: {records}')
		self.assertIn(records[0]['verdict'], (True, False), f'A successful record should carry a verdict: {records[0]}')
		self.assertIsInstance(records[0]['error_estimate'], float, f'A successful record should carry a numeric error estimate: {records[0]}')
		self.assertNotIn('error', records[0], f'A successful record should carry no error message: {records[0]}')
		self.assertEqual(records[0]['config_hash'], config_hash(config), 'Records should carry the configuration hash.')

	def test_failed_record(self):
		out = self.root.joinpath('failed.jsonl')
		config = mcconfig.setup(['melnikov', '--delta', '0.5', '--big-m', '1.2', '--theta-grid', '0', '--jobs', '1', '--out', str(out)])
		with self.assertRaises(SystemExit, msg='A failed grid point should end the run with an error.'):
			config.func(config)
		records = FileIO.load(out)

		self.assertTrue(records[0]['error'].startswith('GeometryError'), f'The record should name the error: {records[0]}')
		self.assertIsNone(records[0]['verdict'], f'A failed record should have no verdict: {records[0]}')
		self.assertNotIn('error_estimate', records[0], f'A failed record should have no error estimate: {records[0]}')

	def test_config_hash(self):
		a, b, c = MockConfig(), MockConfig(), MockConfig(mu=0.1)

		self.assertEqual(config_hash(a), config_hash(b), 'Equal configurations should hash equally.')
		self.assertNotEqual(config_hash(a), config_hash(c), 'Different mass ratios should hash differently.')
		self.assertEqual(config_hash(a), config_hash(MockConfig(out=pathlib.Path('elsewhere.jsonl'))), 'The output path should not enter the hash.')

	def test_gamma_dump(self):
		out = self.root.joinpath('gamma.json')
		do_gamma_dump(MockConfig(command='gamma-dump', e=[0.5, 0.8], out=out))
		loops = FileIO.load(out)

		for loop in loops:
			expected = ContourParams().to_gamma(KeplerOrbit.resonant(loop['e'], 0.3))
			self.assertIsInstance(loop['contour'], ContourPath, f'The loop should be decoded as a path: {loop}')
			self.assertEqual(loop['contour'], expected, f'The dumped loop should match the computed one for e={loop["e"]}.')

	def test_monodromy(self):
		out = self.root.joinpath('monodromy.jsonl')
		do_monodromy(MockConfig(command='monodromy', theta_grid=[0.7], out=out))
		record = FileIO.load(out)[0]

		self.assertIsInstance(record['M_gamma'], UnipotentElement, f'M_gamma should be decoded: {record}')
		self.assertIsInstance(record['error_estimate'], float, f'The record should carry a numeric error estimate: {record}')
		self.assertTrue(np.allclose(record['M_bar'].C3, [[-2.1*record['T_star'], 0], [0, 0]]), f'M_bar should have C3 = D omega T*: {record["M_bar"]}')


class TestFileIO(unittest.TestCase):
	def setUp(self):
		self.tmp = tempfile.TemporaryDirectory()
		self.root = pathlib.Path(self.tmp.name)

	def tearDown(self):
		self.tmp.cleanup()

	def test_backup(self):
		path = self.root.joinpath('sub', 'note.txt')
		FileIO.save('first', path)
		FileIO.save('second', path)

		self.assertEqual(FileIO.load(path), 'second', 'The new file should hold the new data.')
		self.assertEqual(FileIO.load(self.root.joinpath('sub', 'note.000.txt')), 'first', 'The old file should be moved aside.')

	def test_missing(self):
		self.assertEqual(FileIO.load(self.root.joinpath('missing.json'), default={}), {}, 'Missing files should give the default.')

	def test_certificate_codec(self):
		certificate = Certificate(
			system='crtbp-planar',
			I_star=np.array([1.0, 0.77]),
			k_vec=np.array([3, 0]),
			theta=(0.0, 0.7),
			C1_hat=np.array([1 + 2j, 0.5j]),
			C2_hat=np.array([0j, 3 - 1j]),
			C3_bar=np.array([[-2.1, 0.0], [0.0, 0.0]]),
			margins={'d_omega_C1': 120.0, 'C3_C1': math.inf},
			verdict=Verdict.POSITIVE,
			error_estimate=1e-11,
		)
		path = self.root.joinpath('certificate.json')
		FileIO.save(certificate, path)
		restored = FileIO.load(path)

		self.assertIsInstance(restored, Certificate, f'The certificate should be decoded: {restored}')
		self.assertEqual(restored.verdict, Verdict.POSITIVE, 'The verdict should survive.')
		self.assertTrue(np.array_equal(restored.C1_hat, certificate.C1_hat), f'Complex blocks should survive: {restored.C1_hat}')
		self.assertEqual(restored.k_vec.dtype.kind, 'i', 'Integer vectors should stay integer.')
		self.assertEqual(restored.margins['C3_C1'], math.inf, 'Infinite margins should survive.')

import json
import logging

import numpy as np

from .contour import ContourPath
from .melnikov import MelnikovResult
from .variational import Certificate, UnipotentElement, Verdict


def _array(data, dtype: str):
	array = np.array(data, dtype=float)
	if array.size == 0:
		return np.zeros(0, dtype=dtype)
	if dtype.startswith('complex'):
		return array[..., 0] + 1j*array[..., 1]
	return array.astype(dtype)


class MCJSONCodec(json.JSONEncoder):
	"""
	Complex numbers are written as ``[re, im]`` pairs. Arrays and domain objects carry an
	``MCkind`` tag so :meth:`object_hook` can restore them.
	"""
	log = logging.getLogger(f'{__name__}.MCJSONCodec')

	def default(self, obj):
		if isinstance(obj, complex):
			return [obj.real, obj.imag]
		elif isinstance(obj, np.ndarray):
			return {
				'MCkind': 'ndarray',
				'dtype': str(obj.dtype),
				'data': obj.tolist(),
			}
		elif isinstance(obj, np.generic):
			return obj.item()
		elif isinstance(obj, Verdict):
			return obj.value
		elif isinstance(obj, ContourPath):
			return {
				'MCkind': 'ContourPath',
				**obj.to_dict(),
			}
		elif isinstance(obj, UnipotentElement):
			return {
				'MCkind': 'UnipotentElement',
				**obj.to_dict(),
			}
		elif isinstance(obj, Certificate):
			return {
				'MCkind': 'Certificate',
				**obj.to_dict(),
				'error_estimate': obj.error_estimate,
			}
		elif isinstance(obj, MelnikovResult):
			return {
				'MCkind': 'MelnikovResult',
				'value': obj.value,
				'theta': list(obj.theta),
				'contour': obj.contour,
				'error_estimate': obj.error_estimate,
				'params': obj.params,
			}
		else:
			return super(MCJSONCodec, self).default(obj)

	@staticmethod
	def object_hook(obj):
		if 'MCkind' in obj:
			if obj['MCkind'] == 'ndarray':
				return _array(obj['data'], obj['dtype'])
			elif obj['MCkind'] == 'ContourPath':
				return ContourPath.from_dict(obj)
			elif obj['MCkind'] == 'UnipotentElement':
				return UnipotentElement(obj['C1'], obj['C2'], obj['C3'])
			elif obj['MCkind'] == 'Certificate':
				return Certificate(
					system=obj['system'],
					I_star=obj['I_star'],
					k_vec=obj['k_vec'],
					theta=tuple(obj['theta']),
					C1_hat=obj['C1_hat'],
					C2_hat=obj['C2_hat'],
					C3_bar=obj['C3_bar'],
					margins=obj['margins'],
					verdict=Verdict(obj['verdict']),
					error_estimate=obj['error_estimate'],
				)
			elif obj['MCkind'] == 'MelnikovResult':
				return MelnikovResult(
					value=obj['value'],
					theta=tuple(obj['theta']),
					contour=obj['contour'],
					error_estimate=obj['error_estimate'],
					params=obj['params'],
				)
		return obj

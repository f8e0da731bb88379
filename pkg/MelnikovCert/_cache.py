import logging

from cachetools import LRUCache, cached


log = logging.getLogger(f'{__name__}')


def memoize(maxsize: int = 128):
	"""
	LRU-memoize a function of hashable arguments. The cache is exposed as ``func.cache``
	so callers can inspect or clear it.
	"""
	def decorator(func):
		cache = LRUCache(maxsize=maxsize)
		wrapped = cached(cache)(func)
		wrapped.cache = cache
		return wrapped
	return decorator


def clear(*funcs):
	for func in funcs:
		log.debug(f'Clearing {func.__name__}: {func.cache.currsize} items.')
		func.cache.clear()

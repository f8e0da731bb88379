import csv
import json
import logging
from pathlib import Path
from typing import Any, Callable, Dict


def _codec():
	from ._codecs import MCJSONCodec
	return MCJSONCodec


def _write_json(data, f):
	json.dump(data, f, cls=_codec(), sort_keys=True, indent='\t')


def _write_jsonl(records, f):
	for record in records:
		print(json.dumps(record, cls=_codec(), sort_keys=True), file=f)


def _write_csv(rows, f):
	fieldnames = list(rows[0]) if rows else []
	writer = csv.DictWriter(f, fieldnames, extrasaction='ignore', lineterminator='\n')
	writer.writeheader()
	writer.writerows(rows)


def _read_json(f):
	return json.load(f, object_hook=_codec().object_hook)


def _read_jsonl(f):
	return [json.loads(line, object_hook=_codec().object_hook) for line in f if line.strip()]


def _read_csv(f):
	return list(csv.DictReader(f))


writers: Dict[str, Callable] = {'.json': _write_json, '.jsonl': _write_jsonl, '.csv': _write_csv}
readers: Dict[str, Callable] = {'.json': _read_json, '.jsonl': _read_jsonl, '.csv': _read_csv}


##########################################################################################


class FileIO(object):
	"""
	Reading and writing of run output. The suffix of the path picks the format:

	-  ``.json`` -- a single document, encoded with :class:`~MelnikovCert._codecs.MCJSONCodec`.
	-  ``.jsonl`` -- a list of records, one sorted-key JSON object per line.
	-  ``.csv`` -- a list of flat rows; the first row fixes the columns.

	Anything else is treated as plain text.
	"""
	log = logging.getLogger(f'{__name__}.FileIO')

	@classmethod
	def ensure_new_file(cls, path: Path):
		"""
		If ``path`` exists, rename it to the first free ``stem.NNN.suffix`` so the next write
		does not clobber earlier results.
		"""
		path = Path(path)
		if not path.is_file():
			return
		counter = 0
		while (target := path.with_name(f'{path.stem}.{counter:03n}{path.suffix}')).is_file():
			counter += 1
		path.rename(target)
		cls.log.info(f'Moved previous output to {target}')

	@classmethod
	def ensure_directories(cls, path: Path):
		"""Create the parent directories of a file path, or the directory itself."""
		path = Path(path)
		directory = path.parent if path.suffix or path.is_file() else path
		directory.mkdir(parents=True, exist_ok=True)

	@classmethod
	def save(cls, data: Any, path: Path, backup=True):
		"""
		:param data: Document, list of records, or text, matching the suffix of ``path``.
		:param backup: Move an existing file aside with :meth:`ensure_new_file` first.
		"""
		path = Path(path)
		cls.ensure_directories(path)
		if backup:
			cls.ensure_new_file(path)
		with path.open('w', encoding='utf-8', newline='') as f:
			writers.get(path.suffix, lambda text, f: f.write(text))(data, f)
		cls.log.info(f'Wrote {path}')

	@classmethod
	def load(cls, path: Path, default=None):
		"""
		:return: The decoded contents of ``path``, or ``default`` if there is no such file.
		"""
		path = Path(path)
		if not path.is_file():
			cls.log.debug(f'{path} not found, using default')
			return default
		with path.open('r', encoding='utf-8', newline='') as f:
			return readers.get(path.suffix, lambda f: f.read())(f)

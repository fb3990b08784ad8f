# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
Utility functions shared by the densegrasp modules.
"""
import sys
import io
from time import perf_counter
from zlib import crc32
import numpy as np


class CRCIOWrapper(io.IOBase):
	"""
	A wrapper for a binary IO instance that tracks the CRC32 of data read or
	written.

	Dataset files are checksummed as they stream through this wrapper, so it
	prohibits seeking.
	"""

	def __init__(self, inner):
		self.inner = inner
		self.crc32 = 0

	def _update_crc32(self, data):
		self.crc32 = crc32(data, self.crc32) & 0xffffffff
		return data

	def __getattr__(self, name):
		return getattr(self.inner, name)

	@property
	def checksum(self):
		return format_checksum(self.crc32)

	def seek(self, *args, **kwargs):
		raise io.UnsupportedOperation("Seeking not supported.")

	def read(self, *args, **kwargs):
		return self._update_crc32(self.inner.read(*args, **kwargs))

	def readline(self, *args, **kwargs):
		return self._update_crc32(self.inner.readline(*args, **kwargs))

	def write(self, data):
		return self.inner.write(self._update_crc32(data))


def format_checksum(value):
	return "{0:08X}".format(value & 0xffffffff)


def checksum_bytes(data):
	"""
	Returns the CRC32 of data as eight upper-case hex digits.
	"""
	return format_checksum(crc32(data))


def spawn_seeds(seed, count):
	"""
	Derives count independent integer seeds from a master seed.
	"""
	children = np.random.SeedSequence(seed).spawn(count)
	return [int(child.generate_state(1)[0]) for child in children]


def apportion(total, weights):
	"""
	Splits the integer total proportionally to weights.

	Each share is the floor of its exact quota; the leftover units go to the
	largest fractional remainders, lowest index first on ties.
	"""
	weights = np.asarray(weights, dtype=float)
	assert total >= 0
	assert weights.ndim == 1 and len(weights) > 0
	assert np.all(weights >= 0) and weights.sum() > 0

	quota = total * weights / weights.sum()
	counts = np.floor(quota).astype(int)
	leftover = total - counts.sum()

	if leftover > 0:
		remainder = quota - counts
		# Stable sort on the negated remainders keeps the lowest index first.
		order = np.argsort(-remainder, kind="stable")
		counts[order[:leftover]] += 1

	return counts


def progress(iterable, total, label="Working"):
	"""
	Yields items from iterable, reporting progress on stderr.
	"""
	nextupdate = 0 # Make sure we always update the first time.

	for done, item in enumerate(iterable):
		now = perf_counter()
		if now > nextupdate and total:
			sys.stderr.write(
					"\r{0}... {1:6.2f}%".format(label, 100 * done / total)
				)
			sys.stderr.flush()
			nextupdate = now + 1 # Update at most once per second

		yield item

	if total:
		sys.stderr.write("\r{0}... {1:6.2f}%\n".format(label, 100.0))

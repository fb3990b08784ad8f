# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

from io import StringIO
from pkgutil import get_data
from densegrasp import hand as handlib
from densegrasp import io as dgio


def find_data(name):
	"""
	Retrieves the raw contents of a file in the test data directory.
	"""
	return get_data("densegrasp.test", "testdata/{0}".format(name))


def find_text(name):
	return find_data(name).decode("utf-8")


def find_mesh(name):
	"""
	Reads a Wavefront OBJ mesh from the test data directory.
	"""
	return dgio.read_obj(StringIO(find_text("{0}.obj".format(name))))


def find_hand(name):
	"""
	Reads a hand file from the test data directory.
	"""
	return handlib.read_hand(StringIO(find_text("{0}.json".format(name))))

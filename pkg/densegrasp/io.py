# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
Tools for reading and writing the file formats shared by densegrasp: the
OBJ mesh subset, JSON and JSON-lines documents, poses and binary clouds.
"""
import json
import math
from struct import Struct
import numpy as np
from densegrasp import util
from densegrasp import constants as C
from densegrasp.geom import PointCloud, RigidTransform, TriMesh
from densegrasp.validate import ConfigError, ParseError, ValidationError


CLOUD_RECORD = Struct(C.CLOUD_RECORD)


def read_obj(in_buf):
	"""
	Returns the TriMesh described by the OBJ text in in_buf.

	Only "v x y z" and "f i j k" lines (1-based indices) and blank lines are
	accepted; anything else is rejected with its line number.

	in_buf should implement io.IOBase, opened in 'rt' mode.
	"""
	vertices = []
	faces = []

	for lineno, line in enumerate(in_buf, 1):
		fields = line.split()
		if not fields:
			continue

		tag, args = fields[0], fields[1:]
		if tag not in ("v", "f"):
			raise ParseError("unsupported OBJ statement {0!r}".format(tag),
					line=lineno)
		if len(args) != 3:
			raise ParseError("{0!r} needs exactly 3 values, got {1}".format(
					tag, len(args)), line=lineno)

		try:
			if tag == "v":
				vertices.append([float(x) for x in args])
			else:
				faces.append([int(x) - 1 for x in args])
		except ValueError:
			raise ParseError("malformed {0!r} values: {1}".format(
					tag, " ".join(args)), line=lineno) from None

		if tag == "f" and min(faces[-1]) < 0:
			raise ParseError("face indices are 1-based", line=lineno)

	try:
		return TriMesh(vertices, faces)
	except ValidationError as e:
		raise ValidationError("invalid OBJ mesh: {0}".format(e)) from None


def write_obj(mesh, out_buf):
	"""
	Writes mesh to out_buf in the OBJ subset read_obj accepts.

	Coordinates are written with repr so they read back bit-exact.

	out_buf should implement io.IOBase, opened in 'wt' mode.
	"""
	for v in mesh.vertices:
		out_buf.write("v {0!r} {1!r} {2!r}\n".format(*map(float, v)))
	for f in mesh.faces:
		out_buf.write("f {0} {1} {2}\n".format(*(int(i) + 1 for i in f)))


def read_json(in_buf, error=ParseError):
	"""
	Decodes one JSON document, raising error with the line of any problem.
	"""
	try:
		return json.load(in_buf)
	except json.JSONDecodeError as e:
		raise error("malformed JSON ({0}) at line {1}".format(
				e.msg, e.lineno)) from None


def write_json(document, out_buf):
	json.dump(document, out_buf, indent="\t", sort_keys=True)
	out_buf.write("\n")


def read_jsonl(in_buf):
	"""
	Yields (line number, record) for each non-blank line of in_buf.
	"""
	for lineno, line in enumerate(in_buf, 1):
		if not line.strip():
			continue
		try:
			yield lineno, json.loads(line)
		except json.JSONDecodeError as e:
			raise ParseError("malformed JSON ({0})".format(e.msg),
					line=lineno) from None


def write_jsonl(records, out_buf):
	for record in records:
		out_buf.write(json.dumps(record, sort_keys=True))
		out_buf.write("\n")


def config_checksum(document):
	"""
	CRC32 of the canonical JSON encoding of a configuration document.
	"""
	encoded = json.dumps(document, sort_keys=True, separators=(",", ":"))
	return util.checksum_bytes(encoded.encode("utf-8"))


def require(document, name, error=ParseError):
	try:
		return document[name]
	except (KeyError, TypeError):
		raise error("missing required field", field=name) from None


def vector(value, name, size=3, error=ParseError):
	"""
	Returns value as a finite float array of the given length.
	"""
	try:
		result = np.array(value, dtype=float)
	except (TypeError, ValueError):
		raise error("expected {0} numbers".format(size), field=name) from None
	if result.shape != (size,):
		raise error("expected {0} numbers, got {1!r}".format(size, value),
				field=name)
	if not np.all(np.isfinite(result)):
		raise error("values must be finite", field=name)
	return result


def number(value, name, minimum=None, maximum=None, integer=False,
		error=ConfigError):
	"""
	Checks a configuration scalar, returning it as int or float.
	"""
	if isinstance(value, bool) or not isinstance(value, (int, float)):
		raise error("expected a number, got {0!r}".format(value), field=name)
	if integer and value != int(value):
		raise error("expected an integer, got {0!r}".format(value), field=name)
	if not math.isfinite(value):
		raise error("value must be finite", field=name)
	if minimum is not None and value < minimum:
		raise error("must be at least {0!r}, got {1!r}".format(minimum, value),
				field=name)
	if maximum is not None and value > maximum:
		raise error("must be at most {0!r}, got {1!r}".format(maximum, value),
				field=name)
	return int(value) if integer else float(value)


def pose_from_dict(document, name="pose"):
	"""
	Reads {"translation": [x, y, z], "quaternion": [x, y, z, w]}.
	"""
	translation = vector(require(document, "translation"),
			name + ".translation")
	quaternion = vector(require(document, "quaternion"), name + ".quaternion",
			size=4)
	if np.linalg.norm(quaternion) < C.DEGENERATE_EPSILON:
		raise ParseError("quaternion must be nonzero", field=name)
	return RigidTransform.from_quaternion(translation, quaternion)


def write_cloud(cloud, out_buf):
	"""
	Writes a cloud as little-endian float64 (x, y, z, nx, ny, nz) records.

	Returns the CRC32 of the written bytes as eight hex digits.

	out_buf should implement io.IOBase, opened in 'wb' mode.
	"""
	if cloud.normals is None:
		raise ValidationError("cloud files need normals")

	out_buf = util.CRCIOWrapper(out_buf)
	records = np.hstack([cloud.points, cloud.normals])
	for record in records:
		out_buf.write(CLOUD_RECORD.pack(*record))

	return out_buf.checksum


def read_cloud(in_buf):
	"""
	Returns (cloud, checksum) for a cloud written by write_cloud.

	in_buf should implement io.IOBase, opened in 'rb' mode.
	"""
	in_buf = util.CRCIOWrapper(in_buf)
	data = in_buf.read()

	if len(data) % CLOUD_RECORD.size:
		raise ParseError("cloud file length {0} is not a multiple of the "
				"{1}-byte record".format(len(data), CLOUD_RECORD.size))

	records = np.array(list(CLOUD_RECORD.iter_unpack(data)),
			dtype=float).reshape(-1, 6)

	try:
		cloud = PointCloud(records[:, :3], records[:, 3:])
	except ValidationError as e:
		raise ParseError("invalid cloud: {0}".format(e)) from None

	return cloud, in_buf.checksum

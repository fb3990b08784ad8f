# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
Procedural watertight meshes: the bundled object library and the link
shapes of the bundled hands.
"""
import numpy as np
from densegrasp.geom import TriMesh
from densegrasp.validate import ParseError


def box(extents, center=(0.0, 0.0, 0.0)):
	"""
	An axis-aligned box with the given full extents.
	"""
	half = np.asarray(extents, dtype=float) / 2.0
	corners = np.array([
			[-1, -1, -1], [1, -1, -1], [1, 1, -1], [-1, 1, -1],
			[-1, -1, 1], [1, -1, 1], [1, 1, 1], [-1, 1, 1],
		], dtype=float)
	faces = [
			[0, 2, 1], [0, 3, 2], # -z
			[4, 5, 6], [4, 6, 7], # +z
			[0, 1, 5], [0, 5, 4], # -y
			[2, 3, 7], [2, 7, 6], # +y
			[1, 2, 6], [1, 6, 5], # +x
			[0, 4, 7], [0, 7, 3], # -x
		]
	return TriMesh(corners * half + np.asarray(center, dtype=float), faces)


def _loft(bottom, top, height, center):
	"""
	Joins two counter-clockwise xy polygons with matching vertex counts,
	bottom at -height/2 and top at +height/2, capping both ends.

	The caps are fanned from the first vertex, so each polygon must be
	star-shaped about it.
	"""
	n = len(bottom)
	assert n >= 3 and len(top) == n

	vertices = np.vstack([
			np.column_stack([bottom, np.full(n, -height / 2.0)]),
			np.column_stack([top, np.full(n, height / 2.0)]),
		]) + np.asarray(center, dtype=float)

	faces = []
	for i in range(1, n - 1):
		faces.append([0, i + 1, i])
		faces.append([n, n + i, n + i + 1])
	for i in range(n):
		j = (i + 1) % n
		faces.append([i, j, n + j])
		faces.append([i, n + j, n + i])

	return TriMesh(vertices, faces)


def prism(polygon, height, center=(0.0, 0.0, 0.0)):
	"""
	Extrudes a counter-clockwise polygon in the xy plane along z.
	"""
	polygon = np.asarray(polygon, dtype=float)
	return _loft(polygon, polygon, height, center)


def frustum(bottom_radius, top_radius, height, segments=24,
		center=(0.0, 0.0, 0.0)):
	"""
	A capped cone along z; equal radii give a cylinder.
	"""
	assert bottom_radius > 0 and top_radius > 0 and segments >= 3
	angle = 2.0 * np.pi * np.arange(segments) / segments
	ring = np.column_stack([np.cos(angle), np.sin(angle)])
	return _loft(bottom_radius * ring, top_radius * ring, height, center)


def cylinder(radius, height, segments=24, center=(0.0, 0.0, 0.0)):
	return frustum(radius, radius, height, segments, center)


def icosphere(radius, subdivisions=2, center=(0.0, 0.0, 0.0)):
	"""
	A sphere approximated by a subdivided icosahedron.

	Vertices lie exactly on the sphere; faces cut slightly inside it.
	"""
	phi = (1.0 + np.sqrt(5.0)) / 2.0
	vertices = [
			[-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
			[0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
			[phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
		]
	vertices = [np.asarray(v, dtype=float) / np.linalg.norm(v)
			for v in vertices]
	faces = [
			[0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
			[1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
			[3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
			[4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
		]

	for _ in range(subdivisions):
		midpoints = {}

		def midpoint(i, j):
			key = (min(i, j), max(i, j))
			if key not in midpoints:
				m = vertices[i] + vertices[j]
				vertices.append(m / np.linalg.norm(m))
				midpoints[key] = len(vertices) - 1
			return midpoints[key]

		refined = []
		for a, b, c in faces:
			ab = midpoint(a, b)
			bc = midpoint(b, c)
			ca = midpoint(c, a)
			refined.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc],
					[ab, bc, ca]])
		faces = refined

	vertices = np.array(vertices)
	faces = np.array(faces)

	# Wind every face outwards.
	tri = vertices[faces]
	normal = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
	inward = np.einsum("ij,ij->i", normal, tri.sum(axis=1)) < 0
	faces[inward] = faces[inward][:, ::-1]

	return TriMesh(vertices * radius + np.asarray(center, dtype=float), faces)


def l_block(long_side, short_side, thickness, height):
	"""
	The union of two boxes meeting at a right angle, as one prism.

	The polygon starts at its reflex corner so the cap fans stay inside it.
	"""
	a, b, t = long_side, short_side, thickness
	polygon = [
			[t, t], [t, b], [0.0, b], [0.0, 0.0], [a, 0.0], [a, t],
		]
	polygon = np.asarray(polygon) - [a / 2.0, b / 2.0]
	return prism(polygon, height)


# Bundled object library: mesh id -> factory. Sizes are in meters.
OBJECTS = {
	"box-small": lambda: box([0.05, 0.05, 0.05]),
	"box-long": lambda: box([0.12, 0.05, 0.04]),
	"box-flat": lambda: box([0.10, 0.07, 0.025]),
	"cylinder": lambda: cylinder(0.03, 0.10),
	"can": lambda: cylinder(0.035, 0.07),
	"sphere": lambda: icosphere(0.04),
	"ball-small": lambda: icosphere(0.03),
	"cone": lambda: frustum(0.04, 0.015, 0.08),
	"l-block": lambda: l_block(0.10, 0.07, 0.03, 0.04),
}


def object_ids():
	return sorted(OBJECTS)


def make_object(mesh_id):
	"""
	Builds a library mesh, centred near the origin.
	"""
	try:
		factory = OBJECTS[mesh_id]
	except KeyError:
		raise ParseError("unknown object id {0!r}; known: {1}".format(
				mesh_id, ", ".join(object_ids())), field="mesh_id") from None
	return factory()


def from_spec(spec):
	"""
	Builds a link or object mesh from its inline description, e.g.
	{"type": "box", "extents": [...], "center": [...]}.
	"""
	kind = spec.get("type")
	center = spec.get("center", (0.0, 0.0, 0.0))

	try:
		if kind == "box":
			return box(spec["extents"], center)
		if kind == "cylinder":
			return cylinder(spec["radius"], spec["height"],
					spec.get("segments", 16), center)
		if kind == "frustum":
			return frustum(spec["bottom_radius"], spec["top_radius"],
					spec["height"], spec.get("segments", 16), center)
		if kind == "sphere":
			return icosphere(spec["radius"], spec.get("subdivisions", 2),
					center)
	except KeyError as e:
		raise ParseError("{0} primitive is missing {1}".format(kind, e),
				field="shape") from None

	raise ParseError("unknown primitive type {0!r}".format(kind),
			field="shape")

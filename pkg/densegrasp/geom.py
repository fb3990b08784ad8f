# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
Geometric primitives: rigid transforms, 6D rotations, watertight triangle
meshes with signed distance queries, point clouds and point sampling.
"""
import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation
from densegrasp import constants as C
from densegrasp.util import apportion
from densegrasp.validate import (DegenerateRotation, InvalidK,
		ValidationError)


# Closest-feature codes returned by closest_points_on_triangles. Edges are
# numbered by their first corner: 0 is a->b, 1 is b->c, 2 is c->a.
FACE = 0
VERTEX_A = 1
VERTEX_B = 2
VERTEX_C = 3
EDGE_AB = 4
EDGE_BC = 5
EDGE_CA = 6

# Faces tried per point before the k-d tree search widens.
_NEAREST_FACES = 16


def _classname(obj):
	return "{0.__module__}.{0.__name__}".format(type(obj))


def _frozen(array):
	array.setflags(write=False)
	return array


def dot_rows(x, y):
	"""
	Row-wise dot product of two (..., 3) arrays.

	Written out per component so a row gives the same bits whatever batch it
	is evaluated in.
	"""
	return x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] + x[..., 2] * y[..., 2]


def skew(v):
	"""
	Returns the cross-product matrix of the 3-vector v.
	"""
	return np.array([
			[0.0, -v[2], v[1]],
			[v[2], 0.0, -v[0]],
			[-v[1], v[0], 0.0],
		])


def axis_angle_matrix(axis, angle):
	"""
	Rotation matrix turning by angle radians about the unit vector axis.
	"""
	K = skew(axis)
	return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


def perpendicular_basis(n):
	"""
	Returns unit vectors (t1, t2) so that (t1, t2, n) is right-handed.

	The helper axis is the coordinate axis least aligned with n, lowest index
	first, so the basis is a deterministic function of n.
	"""
	n = np.asarray(n, dtype=float)
	helper = np.zeros(3)
	helper[int(np.argmin(np.abs(n)))] = 1.0
	t1 = np.cross(n, helper)
	t1 /= np.linalg.norm(t1)
	t2 = np.cross(n, t1)
	return t1, t2


def rotation_between(u, v):
	"""
	Returns the smallest rotation taking unit vector u onto unit vector v.
	"""
	u = np.asarray(u, dtype=float)
	v = np.asarray(v, dtype=float)
	c = float(np.dot(u, v))

	if c < -1.0 + 1e-12:
		# Opposite vectors: half a turn about any axis perpendicular to u.
		t1, _ = perpendicular_basis(u)
		return axis_angle_matrix(t1, np.pi)

	K = skew(np.cross(u, v))
	return np.eye(3) + K + (K @ K) / (1.0 + c)


class RigidTransform:
	"""
	A proper rigid motion: x -> rotation @ x + translation.
	"""

	__slots__ = [
			'rotation',
			'translation',
		]

	def __init__(self, rotation=None, translation=None, check=True):
		rotation = np.eye(3) if rotation is None else np.array(rotation,
				dtype=float)
		translation = np.zeros(3) if translation is None else np.array(
				translation, dtype=float)

		assert rotation.shape == (3, 3)
		assert translation.shape == (3,)

		if check:
			error = np.abs(rotation.T @ rotation - np.eye(3)).max()
			if not error <= C.UNIT_TOLERANCE:
				raise ValidationError("rotation is not orthonormal "
						"(error {0:.3g})".format(error))
			det = np.linalg.det(rotation)
			if not abs(det - 1.0) <= C.UNIT_TOLERANCE:
				raise ValidationError("rotation has determinant {0!r}, "
						"not +1".format(det))

		self.rotation = _frozen(rotation)
		self.translation = _frozen(translation)

	def __repr__(self):
		return "<{0} translation={1!r}>".format(
				_classname(self), self.translation.tolist())

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False

		if not np.array_equal(self.rotation, other.rotation): return False
		if not np.array_equal(self.translation, other.translation):
			return False

		return True

	@classmethod
	def identity(cls):
		return cls(check=False)

	@classmethod
	def from_matrix(cls, matrix):
		matrix = np.asarray(matrix, dtype=float)
		return cls(matrix[:3, :3], matrix[:3, 3])

	@classmethod
	def from_quaternion(cls, translation, quaternion):
		"""
		Builds a transform from a scalar-last (x, y, z, w) quaternion.
		"""
		rotation = Rotation.from_quat(np.asarray(quaternion, dtype=float))
		return cls(rotation.as_matrix(), translation)

	def quaternion(self):
		"""
		Returns the rotation as a scalar-last (x, y, z, w) quaternion.
		"""
		return Rotation.from_matrix(self.rotation).as_quat()

	def matrix(self):
		result = np.eye(4)
		result[:3, :3] = self.rotation
		result[:3, 3] = self.translation
		return result

	def compose(self, other):
		"""
		Returns self ∘ other: other is applied first.
		"""
		return RigidTransform(
				self.rotation @ other.rotation,
				self.rotation @ other.translation + self.translation,
				check=False,
			)

	def inverse(self):
		return RigidTransform(
				self.rotation.T,
				-(self.rotation.T @ self.translation),
				check=False,
			)

	def apply(self, points):
		"""
		Transforms a 3-vector or an (N, 3) array of points.
		"""
		points = np.asarray(points, dtype=float)
		return points @ self.rotation.T + self.translation

	def apply_vectors(self, vectors):
		return np.asarray(vectors, dtype=float) @ self.rotation.T


class Rot6D:
	"""
	The continuous 6D rotation parameterization: two unconstrained 3-vectors.
	"""

	__slots__ = ['a', 'b']

	def __init__(self, a, b):
		self.a = np.array(a, dtype=float)
		self.b = np.array(b, dtype=float)
		assert self.a.shape == (3,) and self.b.shape == (3,)

	def __repr__(self):
		return "<{0} a={1!r} b={2!r}>".format(
				_classname(self), self.a.tolist(), self.b.tolist())

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False
		return np.array_equal(self.a, other.a) and np.array_equal(
				self.b, other.b)

	@classmethod
	def from_matrix(cls, rotation):
		"""
		The first two columns of a rotation matrix.
		"""
		rotation = np.asarray(rotation, dtype=float)
		return cls(rotation[:, 0], rotation[:, 1])

	def is_degenerate(self):
		na = np.linalg.norm(self.a)
		nb = np.linalg.norm(self.b)
		if na < C.DEGENERATE_EPSILON or nb < C.DEGENERATE_EPSILON:
			return True
		return (np.linalg.norm(np.cross(self.a, self.b))
				< C.DEGENERATE_EPSILON * na * nb)


def gram_schmidt_rot6d(r):
	"""
	Returns the rotation matrix with columns a/|a|, the part of b orthogonal
	to a normalized, and their cross product.

	Raises DegenerateRotation if a vanishes or a and b are parallel.
	"""
	if r.is_degenerate():
		raise DegenerateRotation("cannot orthogonalize a={0!r}, "
				"b={1!r}".format(r.a.tolist(), r.b.tolist()))

	c1 = r.a / np.linalg.norm(r.a)
	u = r.b - np.dot(c1, r.b) * c1
	c2 = u / np.linalg.norm(u)
	c3 = np.cross(c1, c2)

	return np.stack([c1, c2, c3], axis=1)


def gram_schmidt_jacobian(r):
	"""
	Returns J with J[i, j, k] = dR[i, j] / d(a, b)[k] for the rotation R
	built by gram_schmidt_rot6d.
	"""
	if r.is_degenerate():
		raise DegenerateRotation("cannot differentiate a={0!r}, "
				"b={1!r}".format(r.a.tolist(), r.b.tolist()))

	I = np.eye(3)
	na = np.linalg.norm(r.a)
	c1 = r.a / na
	u = r.b - np.dot(c1, r.b) * c1
	nu = np.linalg.norm(u)
	c2 = u / nu

	dc1_da = (I - np.outer(c1, c1)) / na
	dc2_du = (I - np.outer(c2, c2)) / nu
	du_dc1 = -(np.outer(c1, r.b) + np.dot(c1, r.b) * I)

	dc2_da = dc2_du @ du_dc1 @ dc1_da
	dc2_db = dc2_du @ (I - np.outer(c1, c1))
	dc3_da = -skew(c2) @ dc1_da + skew(c1) @ dc2_da
	dc3_db = skew(c1) @ dc2_db

	J = np.zeros((3, 3, 6))
	J[:, 0, :3] = dc1_da
	J[:, 1, :3] = dc2_da
	J[:, 1, 3:] = dc2_db
	J[:, 2, :3] = dc3_da
	J[:, 2, 3:] = dc3_db

	return J


def closest_points_on_triangles(p, a, b, c):
	"""
	Returns (closest, feature) for each row of the (N, 3) arrays p, a, b, c.

	feature tells which part of the triangle holds the closest point, as one
	of the FACE, VERTEX_* and EDGE_* codes.

	Follows the region tests of ClosestPtPointTriangle in Ericson's
	Real-Time Collision Detection, evaluated on whole arrays.
	"""
	ab = b - a
	ac = c - a
	ap = p - a
	bp = p - b
	cp = p - c

	d1 = dot_rows(ab, ap)
	d2 = dot_rows(ac, ap)
	d3 = dot_rows(ab, bp)
	d4 = dot_rows(ac, bp)
	d5 = dot_rows(ab, cp)
	d6 = dot_rows(ac, cp)

	va = d3 * d6 - d5 * d4
	vb = d5 * d2 - d1 * d6
	vc = d1 * d4 - d3 * d2

	closest = np.empty_like(p)
	feature = np.full(len(p), FACE, dtype=np.int8)
	done = np.zeros(len(p), dtype=bool)

	def settle(mask, value, code):
		mask = mask & ~done
		closest[mask] = value[mask]
		feature[mask] = code
		done[mask] = True

	with np.errstate(divide='ignore', invalid='ignore'):
		settle((d1 <= 0) & (d2 <= 0), a, VERTEX_A)
		settle((d3 >= 0) & (d4 <= d3), b, VERTEX_B)

		v = d1 / (d1 - d3)
		settle((vc <= 0) & (d1 >= 0) & (d3 <= 0), a + v[:, None] * ab,
				EDGE_AB)

		settle((d6 >= 0) & (d5 <= d6), c, VERTEX_C)

		w = d2 / (d2 - d6)
		settle((vb <= 0) & (d2 >= 0) & (d6 <= 0), a + w[:, None] * ac,
				EDGE_CA)

		w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
		settle((va <= 0) & (d4 - d3 >= 0) & (d5 - d6 >= 0),
				b + w[:, None] * (c - b), EDGE_BC)

		denom = 1.0 / (va + vb + vc)
		v = vb * denom
		w = vc * denom
		settle(~done, a + v[:, None] * ab + w[:, None] * ac, FACE)

	return closest, feature


class Proximity:
	"""
	The result of a closest-point query of many points against one mesh.
	"""

	__slots__ = [
			'points',
			'closest',
			'face',
			'feature',
			'distance',
			'signed',
			'normal',
		]

	def __init__(self, points, closest, face, feature, distance, signed,
			normal):
		self.points = points
		self.closest = closest
		self.face = face
		self.feature = feature
		self.distance = distance
		self.signed = signed
		self.normal = normal

	def __len__(self):
		return len(self.points)

	def gradient(self):
		"""
		Returns d(signed distance)/d(point) with the closest point held fixed.

		On the surface itself this is the inward pseudonormal.
		"""
		result = -self.normal.copy()
		away = self.distance > 0
		sign = np.where(self.signed > 0, 1.0, -1.0)
		result[away] = (sign[away, None]
				* (self.points[away] - self.closest[away])
				/ self.distance[away, None])
		return result


class TriMesh:
	"""
	A watertight, consistently oriented triangle mesh with outward normals.

	Instances are immutable; everything the distance queries need is derived
	once, at construction.
	"""

	__slots__ = [
			'vertices',
			'faces',
			'face_normals',
			'face_areas',
			'vertex_pseudonormals',
			'edge_pseudonormals',
			'lower',
			'upper',
			'_tree',
			'_radius',
		]

	def __init__(self, vertices, faces):
		vertices = np.array(vertices, dtype=float)
		faces = np.array(faces, dtype=np.int64)

		if vertices.ndim != 2 or vertices.shape[1] != 3 or not len(vertices):
			raise ValidationError("vertices must be a non-empty (N, 3) "
					"array")
		if faces.ndim != 2 or faces.shape[1] != 3 or not len(faces):
			raise ValidationError("faces must be a non-empty (M, 3) array")
		if not np.all(np.isfinite(vertices)):
			raise ValidationError("vertices must be finite")
		if faces.min() < 0 or faces.max() >= len(vertices):
			raise ValidationError("face index out of range for {0} "
					"vertices".format(len(vertices)))

		tri = vertices[faces]
		a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
		cross = np.cross(b - a, c - a)
		doubleArea = np.linalg.norm(cross, axis=1)
		if np.any(doubleArea <= 1e-300):
			raise ValidationError("mesh has zero-area faces: {0!r}".format(
					np.nonzero(doubleArea <= 1e-300)[0][:5].tolist()))
		normals = cross / doubleArea[:, None]

		# Every directed edge must be unique and every undirected edge must
		# be shared by exactly two faces: watertight and consistently wound.
		directed = faces[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
		if len(np.unique(directed, axis=0)) != len(directed):
			raise ValidationError("mesh faces are not consistently oriented")

		undirected = np.sort(directed, axis=1)
		_, edgeIndex, edgeCount = np.unique(undirected, axis=0,
				return_inverse=True, return_counts=True)
		edgeIndex = edgeIndex.reshape(-1)
		if np.any(edgeCount != 2):
			raise ValidationError("mesh is not watertight: {0} edges are not "
					"shared by exactly two faces".format(
						int(np.count_nonzero(edgeCount != 2))))

		volume = np.sum(dot_rows(a, np.cross(b, c))) / 6.0
		if volume <= 0:
			raise ValidationError("mesh faces point inwards (signed volume "
					"{0!r})".format(volume))

		edgeSums = np.zeros((len(edgeCount), 3))
		np.add.at(edgeSums, edgeIndex, np.repeat(normals, 3, axis=0))
		edgeSums /= np.linalg.norm(edgeSums, axis=1)[:, None]

		vertexSums = np.zeros_like(vertices)
		for corner in range(3):
			u = tri[:, (corner + 1) % 3] - tri[:, corner]
			w = tri[:, (corner + 2) % 3] - tri[:, corner]
			angle = np.arctan2(
					np.linalg.norm(np.cross(u, w), axis=1), dot_rows(u, w))
			np.add.at(vertexSums, faces[:, corner], angle[:, None] * normals)
		lengths = np.linalg.norm(vertexSums, axis=1)
		used = lengths > 0
		vertexSums[used] /= lengths[used, None]

		self.vertices = _frozen(vertices)
		self.faces = _frozen(faces)
		self.face_normals = _frozen(normals)
		self.face_areas = _frozen(doubleArea / 2.0)
		self.vertex_pseudonormals = _frozen(vertexSums)
		self.edge_pseudonormals = _frozen(edgeSums[edgeIndex].reshape(-1, 3, 3))
		self.lower = _frozen(vertices.min(axis=0))
		self.upper = _frozen(vertices.max(axis=0))
		centroids = tri.mean(axis=1)
		self._tree = cKDTree(centroids)
		self._radius = float(np.linalg.norm(tri - centroids[:, None],
				axis=2).max())

	def __repr__(self):
		return "<{0} vertices={1} faces={2}>".format(
				_classname(self), len(self.vertices), len(self.faces))

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False
		return (np.array_equal(self.vertices, other.vertices)
				and np.array_equal(self.faces, other.faces))

	@property
	def area(self):
		return float(self.face_areas.sum())

	@property
	def volume(self):
		tri = self.vertices[self.faces]
		return float(np.sum(dot_rows(tri[:, 0],
				np.cross(tri[:, 1], tri[:, 2]))) / 6.0)

	@property
	def center_mass(self):
		"""
		Centroid of the enclosed solid, assuming uniform density.
		"""
		tri = self.vertices[self.faces]
		volumes = dot_rows(tri[:, 0], np.cross(tri[:, 1], tri[:, 2])) / 6.0
		centers = tri.sum(axis=1) / 4.0
		return (volumes[:, None] * centers).sum(axis=0) / volumes.sum()

	def bounding_radius(self, center):
		return float(np.linalg.norm(self.vertices - center, axis=1).max())

	def transformed(self, pose):
		return TriMesh(pose.apply(self.vertices), self.faces)

	def triangles(self):
		tri = self.vertices[self.faces]
		return tri[:, 0], tri[:, 1], tri[:, 2]

	def in_bounds(self, points, margin=0.0):
		"""
		Mask of points inside the axis-aligned bounds grown by margin.
		"""
		points = np.asarray(points, dtype=float)
		return np.all((points >= self.lower - margin)
				& (points <= self.upper + margin), axis=1)

	def box_distance2(self, points):
		"""
		Squared distance from each point to the axis-aligned bounds; a lower
		bound on the squared distance to the surface.
		"""
		points = np.asarray(points, dtype=float)
		gap = np.maximum(self.lower - points, 0.0) + np.maximum(
				points - self.upper, 0.0)
		return dot_rows(gap, gap)

	def closest_points(self, points):
		"""
		Returns (closest, face, feature, squared distance) for each point.

		A k-d tree over face centroids narrows the search. No point of a face
		lies farther than the mesh's largest face radius from that face's
		centroid, so once a candidate distance is known every face whose
		centroid is farther than it plus that radius is skipped. The answer
		is the one an exhaustive scan would give: minimal squared distance,
		lowest face index on ties.
		"""
		points = np.asarray(points, dtype=float).reshape(-1, 3)
		count = len(points)

		closest = np.empty_like(points)
		face = np.empty(count, dtype=np.int64)
		feature = np.empty(count, dtype=np.int8)
		distance2 = np.empty(count)
		if not count:
			return closest, face, feature, distance2

		k = min(_NEAREST_FACES, len(self.faces))
		centroidDistance, nearest = self._tree.query(points, k=k)
		centroidDistance = centroidDistance.reshape(count, k)
		nearest = nearest.reshape(count, k)

		rows, q, f, feat, d2 = self._nearest_among(points,
				np.repeat(np.arange(count), k), nearest.reshape(-1))
		closest[rows] = q
		face[rows] = f
		feature[rows] = feat
		distance2[rows] = d2

		if k == len(self.faces):
			return closest, face, feature, distance2

		# Faces outside the k nearest centroids are no closer than this.
		reach = centroidDistance[:, -1] - self._radius
		bound = distance2 * (1.0 + 1e-6) + 1e-18
		unsettled = np.nonzero((reach <= 0) | (reach * reach <= bound))[0]
		if not len(unsettled):
			return closest, face, feature, distance2

		radius = np.sqrt(bound[unsettled]) + self._radius + 1e-12
		found = self._tree.query_ball_point(points[unsettled], radius)
		counts = np.fromiter((len(x) for x in found), dtype=np.int64,
				count=len(found))
		faceIndex = np.concatenate(
				[np.asarray(x, dtype=np.int64) for x in found])

		rows, q, f, feat, d2 = self._nearest_among(points,
				np.repeat(unsettled, counts), faceIndex)
		closest[rows] = q
		face[rows] = f
		feature[rows] = feat
		distance2[rows] = d2

		return closest, face, feature, distance2

	def _nearest_among(self, points, pointIndex, faceIndex):
		"""
		Exact closest points over (point, face) pairs, reduced to the best
		pair per point.
		"""
		a, b, c = self.triangles()
		query = points[pointIndex]
		q, f = closest_points_on_triangles(query, a[faceIndex],
				b[faceIndex], c[faceIndex])
		diff = query - q
		d2 = dot_rows(diff, diff)

		order = np.lexsort((faceIndex, d2, pointIndex))
		ordered = pointIndex[order]
		first = np.ones(len(order), dtype=bool)
		first[1:] = ordered[1:] != ordered[:-1]
		best = order[first]

		return (pointIndex[best], q[best], faceIndex[best], f[best],
				d2[best])

	def pseudonormals(self, face, feature):
		"""
		Angle-weighted pseudonormals for closest features.
		"""
		result = self.face_normals[face].copy()

		for code, corner in ((VERTEX_A, 0), (VERTEX_B, 1), (VERTEX_C, 2)):
			mask = feature == code
			result[mask] = self.vertex_pseudonormals[
					self.faces[face[mask], corner]]

		for code, edge in ((EDGE_AB, 0), (EDGE_BC, 1), (EDGE_CA, 2)):
			mask = feature == code
			result[mask] = self.edge_pseudonormals[face[mask], edge]

		return result

	def query(self, points):
		"""
		Signed distances of many points; positive means inside the mesh.
		"""
		points = np.asarray(points, dtype=float).reshape(-1, 3)
		closest, face, feature, distance2 = self.closest_points(points)
		distance = np.sqrt(distance2)
		normal = self.pseudonormals(face, feature)
		inside = dot_rows(points - closest, normal) < 0
		signed = np.where(inside, distance, -distance)

		return Proximity(points, closest, face, feature, distance, signed,
				normal)

	def signed_distances(self, points):
		return self.query(points).signed


def signed_distance(mesh, p):
	"""
	Signed distance from p to the mesh surface: penetration depth inside,
	minus the Euclidean distance outside.
	"""
	return float(mesh.query(p).signed[0])


def closest_surface_point(mesh, p):
	return mesh.closest_points(p)[0][0]


def max_signed_distance(meshes, points, margin=0.0):
	"""
	Returns the largest signed distance of any point to any mesh.

	Only points within margin of a mesh's bounds are measured, so the result
	is exact whenever it is above -margin; -inf means nothing came that close.
	"""
	points = np.asarray(points, dtype=float).reshape(-1, 3)
	deepest = -np.inf

	for mesh in meshes:
		near = mesh.in_bounds(points, margin)
		if np.any(near):
			deepest = max(deepest,
					float(mesh.signed_distances(points[near]).max()))

	return deepest


class PointCloud:
	"""
	Points with optional outward unit normals.
	"""

	__slots__ = ['points', 'normals']

	def __init__(self, points, normals=None):
		points = np.array(points, dtype=float).reshape(-1, 3)

		if normals is not None:
			normals = np.array(normals, dtype=float).reshape(-1, 3)
			if len(normals) != len(points):
				raise ValidationError("{0} points but {1} normals".format(
						len(points), len(normals)))
			error = np.abs(np.linalg.norm(normals, axis=1) - 1.0)
			if len(error) and not error.max() <= C.UNIT_TOLERANCE:
				raise ValidationError("normals must have unit length "
						"(error {0:.3g})".format(error.max()))
			normals = _frozen(normals)

		self.points = _frozen(points)
		self.normals = normals

	def __len__(self):
		return len(self.points)

	def __repr__(self):
		return "<{0} points={1}>".format(_classname(self), len(self))

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False
		if not np.array_equal(self.points, other.points): return False
		if (self.normals is None) != (other.normals is None): return False
		return self.normals is None or np.array_equal(self.normals,
				other.normals)

	def subset(self, indices):
		indices = np.asarray(indices, dtype=np.int64)
		normals = None if self.normals is None else self.normals[indices]
		return PointCloud(self.points[indices], normals)


def sample_triangles(vertices, faces, n, seed):
	"""
	Draws n points area-weighted over the given triangles.

	Each face receives its share of n rounded by largest remainder; the
	positions within faces are uniform. Returns a PointCloud carrying the
	face normals, plus the face index of every point.
	"""
	assert n >= 1
	vertices = np.asarray(vertices, dtype=float)
	faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
	tri = vertices[faces]
	cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
	doubleArea = np.linalg.norm(cross, axis=1)

	counts = apportion(n, doubleArea)
	faceIndex = np.repeat(np.arange(len(faces)), counts)

	rng = np.random.default_rng(seed)
	u, v = rng.random((2, n))
	flip = u + v > 1.0
	u[flip] = 1.0 - u[flip]
	v[flip] = 1.0 - v[flip]

	a = tri[faceIndex, 0]
	points = (a + u[:, None] * (tri[faceIndex, 1] - a)
			+ v[:, None] * (tri[faceIndex, 2] - a))
	normals = cross[faceIndex] / doubleArea[faceIndex, None]

	return PointCloud(points, normals), faceIndex


def sample_surface(mesh, n, seed):
	"""
	Draws n points area-weighted over the mesh, deterministic in seed.
	"""
	cloud, _ = sample_triangles(mesh.vertices, mesh.faces, n, seed)
	return cloud


def farthest_point_sampling(cloud, k, start=0):
	"""
	Greedy farthest point sampling.

	cloud is a PointCloud or an (N, 3) array. The first index is start; each
	next index maximizes the distance to the indices already chosen, lowest
	index first on ties.
	"""
	points = cloud.points if isinstance(cloud, PointCloud) else np.asarray(
			cloud, dtype=float).reshape(-1, 3)

	if not 1 <= k <= len(points):
		raise InvalidK("k must be between 1 and {0}, not {1!r}".format(
				len(points), k))
	if not 0 <= start < len(points):
		raise InvalidK("start index {0!r} is outside the cloud".format(start))

	def distance2(index):
		diff = points - points[index]
		return dot_rows(diff, diff)

	chosen = [start]
	nearest = distance2(start)
	nearest[start] = -np.inf

	while len(chosen) < k:
		index = int(np.argmax(nearest))
		chosen.append(index)
		nearest = np.minimum(nearest, distance2(index))
		nearest[index] = -np.inf

	return chosen

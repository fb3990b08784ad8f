# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
Table-top scenes: quasi-stable object poses, collision-free placement,
depth rendering from a camera rig, point-cloud fusion, synthetic grasp
labels and dataset files.
"""
import logging
import os
import numpy as np
from scipy.spatial import ConvexHull, QhullError
from densegrasp import constants as C
from densegrasp import io as dgio
from densegrasp import primitives
from densegrasp import util
from densegrasp.geom import (PointCloud, RigidTransform, Rot6D,
		axis_angle_matrix, farthest_point_sampling, perpendicular_basis,
		rotation_between, sample_surface)
from densegrasp.grasp import (GraspConfig, GraspLabel, match_labels,
		write_labels, write_labelset)
from densegrasp.hand import close_fingers
from densegrasp.losses import collision_loss
from densegrasp.validate import (ConfigError, EmptyView, NoStableFace,
		ParseError, ValidationError)


log = logging.getLogger(__name__)

TABLE_THICKNESS = 0.02

# Rays tested against all faces of a mesh at once.
_BLOCK_PAIRS = 1 << 20


def _classname(obj):
	return "{0.__module__}.{0.__name__}".format(type(obj))


def table_mesh(extent):
	"""
	A table slab with its top face on z=0, centred on the origin.
	"""
	return primitives.box([extent[0], extent[1], TABLE_THICKNESS],
			[0.0, 0.0, -TABLE_THICKNESS / 2.0])


def _yaw(angle):
	return axis_angle_matrix(np.array([0.0, 0.0, 1.0]), angle)


class SupportFace:
	"""
	A face of an object's convex hull, coplanar hull triangles merged.
	"""

	__slots__ = ['normal', 'offset', 'area', 'vertices']

	def __init__(self, normal, offset, area, vertices):
		self.normal = normal
		self.offset = offset
		self.area = area
		self.vertices = vertices

	def supports(self, point):
		"""
		True if point projects strictly inside the face.
		"""
		t1, t2 = perpendicular_basis(self.normal)
		planar = np.column_stack([self.vertices @ t1, self.vertices @ t2])
		try:
			hull = ConvexHull(planar)
		except QhullError:
			return False
		p = np.array([point @ t1, point @ t2, 1.0])
		return bool(np.all(hull.equations @ p < -1e-9))


def support_faces(mesh):
	"""
	Returns the faces of mesh's convex hull, largest first.
	"""
	try:
		hull = ConvexHull(mesh.vertices)
	except QhullError as e:
		raise NoStableFace("degenerate convex hull: {0}".format(e)) from None

	# Triangulated hull facets that share a plane share its equation.
	groups = {}
	for simplex, equation in zip(hull.simplices, hull.equations):
		key = tuple(np.round(equation, 9))
		groups.setdefault(key, (equation, []))[1].append(simplex)

	faces = []
	for equation, simplices in groups.values():
		simplices = np.array(simplices)
		tri = hull.points[simplices]
		area = np.linalg.norm(np.cross(tri[:, 1] - tri[:, 0],
				tri[:, 2] - tri[:, 0]), axis=1).sum() / 2.0
		faces.append(SupportFace(equation[:3], equation[3], area,
				hull.points[np.unique(simplices)]))

	faces.sort(key=lambda f: -f.area)
	return faces


def stable_faces(mesh):
	"""
	Hull faces the mesh can rest on: its center of mass projects strictly
	inside them.
	"""
	com = mesh.center_mass
	result = [f for f in support_faces(mesh) if f.supports(com)]
	if not result:
		raise NoStableFace("no hull face supports the center of mass")
	return result


def stable_pose(mesh, seed, standard=False):
	"""
	A quasi-stable resting pose on the plane z=0, centred on the z axis.

	A stable hull face is drawn with probability proportional to its area
	and the object gets a uniform random yaw. With standard, the largest
	stable face is used with zero yaw.
	"""
	rng = np.random.default_rng(seed)

	try:
		faces = stable_faces(mesh)
	except NoStableFace as e:
		log.warning("%s; resting on the largest hull face", e)
		faces = support_faces(mesh)[:1]

	if standard:
		face = faces[0]
		yaw = 0.0
	else:
		areas = np.array([f.area for f in faces])
		face = faces[int(rng.choice(len(faces), p=areas / areas.sum()))]
		yaw = rng.uniform(0.0, 2.0 * np.pi)

	rotation = _yaw(yaw) @ rotation_between(face.normal,
			np.array([0.0, 0.0, -1.0]))
	turned = mesh.vertices @ rotation.T
	center = rotation @ mesh.center_mass
	translation = np.array([-center[0], -center[1], -turned[:, 2].min()])

	return RigidTransform(rotation, translation)


class ObjectInstance:
	"""
	A library object placed in a scene.

	The pose is kept as the translation and quaternion written to scene
	files, so a scene read back is the scene that was generated.
	"""

	__slots__ = ['mesh_id', 'mesh', 'translation', 'quaternion', 'pose',
			'world_mesh', 'com']

	def __init__(self, mesh_id, mesh, translation, quaternion):
		self.mesh_id = mesh_id
		self.mesh = mesh
		self.translation = np.array(translation, dtype=float)
		self.quaternion = np.array(quaternion, dtype=float)
		self.pose = RigidTransform.from_quaternion(self.translation,
				self.quaternion)
		self.world_mesh = mesh.transformed(self.pose)
		self.com = self.pose.apply(mesh.center_mass)

	def __repr__(self):
		return "<{0} {1!r} at {2!r}>".format(_classname(self), self.mesh_id,
				self.translation.tolist())

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False
		return (self.mesh_id == other.mesh_id
				and np.array_equal(self.translation, other.translation)
				and np.array_equal(self.quaternion, other.quaternion))

	@classmethod
	def from_pose(cls, mesh_id, mesh, pose):
		return cls(mesh_id, mesh, pose.translation, pose.quaternion())

	def to_dict(self):
		return {
			"mesh_id": self.mesh_id,
			"pose": {
				"translation": [float(x) for x in self.translation],
				"quaternion": [float(x) for x in self.quaternion],
			},
		}


class Scene:
	"""
	A table with objects resting on it.

	skipped lists the mesh ids that could not be placed.
	"""

	__slots__ = ['table', 'table_extent', 'objects', 'seed', 'skipped']

	def __init__(self, table_extent, objects, seed, skipped=()):
		self.table_extent = tuple(float(x) for x in table_extent)
		self.table = table_mesh(self.table_extent)
		self.objects = list(objects)
		self.seed = seed
		self.skipped = list(skipped)

	def __repr__(self):
		return "<{0} objects={1!r}>".format(_classname(self),
				[o.mesh_id for o in self.objects])

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False
		return (self.table_extent == other.table_extent
				and self.objects == other.objects
				and self.seed == other.seed
				and self.skipped == other.skipped)

	def object_meshes(self):
		return [o.world_mesh for o in self.objects]

	def meshes(self):
		"""
		All meshes: the table first, then the objects in order.
		"""
		return [self.table] + self.object_meshes()

	def to_dict(self):
		return {
			"seed": self.seed,
			"table_extent": list(self.table_extent),
			"objects": [o.to_dict() for o in self.objects],
			"skipped": self.skipped,
		}

	@classmethod
	def from_dict(cls, document):
		objects = []
		for i, entry in enumerate(dgio.require(document, "objects")):
			mesh_id = dgio.require(entry, "mesh_id")
			field = "objects[{0}].pose".format(i)
			pose = dgio.require(entry, "pose")
			objects.append(ObjectInstance(
					mesh_id,
					primitives.make_object(mesh_id),
					dgio.vector(dgio.require(pose, "translation"),
						field + ".translation"),
					dgio.vector(dgio.require(pose, "quaternion"),
						field + ".quaternion", size=4),
				))

		return cls(
				dgio.vector(dgio.require(document, "table_extent"),
					"table_extent", size=2),
				objects,
				document.get("seed"),
				document.get("skipped", []),
			)


def _overlaps(mesh, others, seed):
	"""
	True if mesh and any of others interpenetrate by more than the scene
	tolerance, judged on sampled surface points in both directions.
	"""
	samples = sample_surface(mesh, C.OVERLAP_SAMPLES, seed).points
	for other in others:
		if np.any(other.signed_distances(samples) >= C.SCENE_TOLERANCE):
			return True
	return False


def place_objects(meshes, count, table_extent, seed, standard=False):
	"""
	Places count of the (mesh id, mesh) pairs on the table.

	Each object gets up to PLACEMENT_ATTEMPTS random positions and stable
	poses; one that never fits without interpenetration is skipped and its id
	recorded in the scene.
	"""
	assert count >= 1
	rng = np.random.default_rng(seed)
	chosen = rng.choice(len(meshes), size=count, replace=count > len(meshes))
	table = table_mesh(table_extent)

	placed = []
	skipped = []
	for index in chosen:
		mesh_id, mesh = meshes[int(index)]

		for attempt in range(C.PLACEMENT_ATTEMPTS):
			pose = stable_pose(mesh, int(rng.integers(2 ** 32)), standard)
			resting = mesh.transformed(pose)
			half = (resting.upper[:2] - resting.lower[:2]) / 2.0
			room = np.maximum(np.asarray(table_extent) / 2.0 - half, 0.0)
			xy = rng.uniform(-room, room)

			pose = RigidTransform(pose.rotation,
					pose.translation + [xy[0], xy[1], 0.0])
			candidate = ObjectInstance.from_pose(mesh_id, mesh, pose)
			world = candidate.world_mesh
			checkSeed = int(rng.integers(2 ** 32))

			others = [o.world_mesh for o in placed]
			if _overlaps(world, [table] + others, checkSeed):
				continue
			if any(_overlaps(other, [world], checkSeed) for other in others):
				continue

			placed.append(candidate)
			break
		else:
			log.info("no room for %r after %d attempts; skipped", mesh_id,
					C.PLACEMENT_ATTEMPTS)
			skipped.append(mesh_id)

	return Scene(table_extent, placed, seed, skipped)


class CameraSpec:
	"""
	A pinhole camera looking from position at look_at.
	"""

	__slots__ = ['position', 'look_at', 'up', 'width', 'height', 'fov']

	def __init__(self, position, look_at, up=(0.0, 0.0, 1.0),
			width=C.IMAGE_WIDTH, height=C.IMAGE_HEIGHT, fov=C.VERTICAL_FOV):
		self.position = np.array(position, dtype=float)
		self.look_at = np.array(look_at, dtype=float)
		self.up = np.array(up, dtype=float)
		self.width = int(width)
		self.height = int(height)
		self.fov = float(fov)

		forward = self.look_at - self.position
		if np.linalg.norm(forward) < C.DEGENERATE_EPSILON:
			raise ValidationError("camera look direction is zero")
		if np.linalg.norm(np.cross(forward, self.up)) < C.DEGENERATE_EPSILON:
			raise ValidationError("camera up is parallel to its look "
					"direction")
		if not 0 < self.fov < np.pi:
			raise ValidationError("field of view must lie in (0, pi), not "
					"{0!r}".format(self.fov))
		if self.width < 1 or self.height < 1:
			raise ValidationError("image must have at least one pixel")

	def __repr__(self):
		return "<{0} at {1!r}>".format(_classname(self),
				self.position.tolist())

	def rays(self):
		"""
		Returns (origins, unit directions), one per pixel in row-major order
		from the top-left pixel.
		"""
		forward = self.look_at - self.position
		forward /= np.linalg.norm(forward)
		right = np.cross(forward, self.up)
		right /= np.linalg.norm(right)
		up = np.cross(right, forward)

		tanHalf = np.tan(self.fov / 2.0)
		aspect = self.width / self.height
		col = (np.arange(self.width) + 0.5) / self.width * 2.0 - 1.0
		row = 1.0 - (np.arange(self.height) + 0.5) / self.height * 2.0
		x, y = np.meshgrid(col * tanHalf * aspect, row * tanHalf)

		directions = (forward + x.reshape(-1, 1) * right
				+ y.reshape(-1, 1) * up)
		directions /= np.linalg.norm(directions, axis=1)[:, None]
		origins = np.broadcast_to(self.position, directions.shape)

		return origins, directions

	def to_dict(self):
		return {
			"position": self.position.tolist(),
			"look_at": self.look_at.tolist(),
			"up": self.up.tolist(),
			"width": self.width,
			"height": self.height,
			"fov": self.fov,
		}

	@classmethod
	def from_dict(cls, document):
		return cls(
				dgio.vector(dgio.require(document, "position", ConfigError),
					"position", error=ConfigError),
				dgio.vector(document.get("look_at", [0, 0, 0]), "look_at",
					error=ConfigError),
				dgio.vector(document.get("up", [0, 0, 1]), "up",
					error=ConfigError),
				dgio.number(document.get("width", C.IMAGE_WIDTH), "width",
					minimum=1, integer=True),
				dgio.number(document.get("height", C.IMAGE_HEIGHT), "height",
					minimum=1, integer=True),
				dgio.number(document.get("fov", C.VERTICAL_FOV), "fov"),
			)


def default_cameras(table_extent):
	"""
	Four cameras over the midpoints of the table sides, 45 degrees up, all
	aimed at the table centre.
	"""
	ex, ey = table_extent
	positions = [
		(ex / 2.0, 0.0, ex / 2.0),
		(-ex / 2.0, 0.0, ex / 2.0),
		(0.0, ey / 2.0, ey / 2.0),
		(0.0, -ey / 2.0, ey / 2.0),
	]
	return [CameraSpec(p, (0.0, 0.0, 0.0)) for p in positions]


def _slab_hits(mesh, origins, directions):
	"""
	Mask of rays that hit the mesh's bounding box in front of their origin.
	"""
	with np.errstate(divide="ignore", invalid="ignore"):
		inverse = 1.0 / directions
		t1 = (mesh.lower - origins) * inverse
		t2 = (mesh.upper - origins) * inverse
	near = np.nanmax(np.minimum(t1, t2), axis=1)
	far = np.nanmin(np.maximum(t1, t2), axis=1)
	return (far >= np.maximum(near, 0.0)) & np.isfinite(far)


def intersect_triangles(origins, directions, a, b, c):
	"""
	Möller-Trumbore intersection of every ray with every triangle.

	Returns (distance, face) per ray: the nearest hit in front of the origin,
	lowest face index on ties, inf and -1 on a miss.
	"""
	e1 = b - a
	e2 = c - a

	pvec = np.cross(directions[:, None], e2[None])
	det = np.einsum("fk,rfk->rf", e1, pvec)
	valid = np.abs(det) > 1e-15

	with np.errstate(divide="ignore", invalid="ignore"):
		inverse = 1.0 / det
		tvec = origins[:, None] - a[None]
		u = np.einsum("rfk,rfk->rf", tvec, pvec) * inverse
		qvec = np.cross(tvec, e1[None])
		v = np.einsum("rk,rfk->rf", directions, qvec) * inverse
		t = np.einsum("fk,rfk->rf", e2, qvec) * inverse

	hit = valid & (u >= 0) & (v >= 0) & (u + v <= 1) & (t > 1e-12)
	t = np.where(hit, t, np.inf)

	face = np.argmin(t, axis=1)
	distance = t[np.arange(len(t)), face]
	face[~np.isfinite(distance)] = -1

	return distance, face


def raycast(meshes, origins, directions):
	"""
	Nearest hit of each ray over several meshes.

	Returns (distance, mesh index, outward normal); a miss has distance inf,
	mesh index -1 and a zero normal. Earlier meshes win exact ties.
	"""
	origins = np.asarray(origins, dtype=float)
	directions = np.asarray(directions, dtype=float)

	distance = np.full(len(directions), np.inf)
	owner = np.full(len(directions), -1)
	normal = np.zeros((len(directions), 3))

	for m, mesh in enumerate(meshes):
		rays = np.nonzero(_slab_hits(mesh, origins, directions))[0]
		if not len(rays):
			continue

		a, b, c = mesh.triangles()
		block = max(1, _BLOCK_PAIRS // len(mesh.faces))
		for start in range(0, len(rays), block):
			chunk = rays[start:start + block]
			t, face = intersect_triangles(origins[chunk], directions[chunk],
					a, b, c)
			closer = t < distance[chunk]
			update = chunk[closer]
			distance[update] = t[closer]
			owner[update] = m
			normal[update] = mesh.face_normals[face[closer]]

	return distance, owner, normal


class DepthImage:
	"""
	What one camera sees: per pixel depth along the ray, hit id (-1 miss,
	0 table, i+1 object i), outward normal and world point.
	"""

	__slots__ = ['depth', 'hit', 'normals', 'points']

	def __init__(self, depth, hit, normals, points):
		self.depth = depth
		self.hit = hit
		self.normals = normals
		self.points = points


def render_depth(scene, camera):
	origins, directions = camera.rays()
	meshes = scene.meshes() if scene is not None else []
	distance, owner, normal = raycast(meshes, origins, directions)

	with np.errstate(invalid="ignore"):
		points = origins + distance[:, None] * directions
	points[owner < 0] = np.nan

	shape = (camera.height, camera.width)
	return DepthImage(distance.reshape(shape), owner.reshape(shape),
			normal.reshape(shape + (3,)), points.reshape(shape + (3,)))


def fuse_point_cloud(scene, cameras, seed, size=C.CLOUD_SIZE):
	"""
	Fuses the object pixels of all cameras into a cloud of exactly size
	points.

	Larger sets are thinned by farthest point sampling from a seeded start;
	smaller ones are padded by resampling points at random.
	"""
	points = []
	normals = []
	for camera in cameras:
		image = render_depth(scene, camera)
		objects = image.hit >= 1
		points.append(image.points[objects])
		normals.append(image.normals[objects])

	points = np.vstack(points)
	normals = np.vstack(normals)
	if not len(points):
		raise EmptyView("no camera sees any object")

	rng = np.random.default_rng(seed)
	if len(points) >= size:
		start = int(rng.integers(len(points)))
		indices = farthest_point_sampling(points, size, start)
	else:
		extra = rng.choice(len(points), size=size - len(points))
		indices = np.concatenate([np.arange(len(points)), extra])

	return PointCloud(points[indices], normals[indices])


def synth_labels(scene, hand, per_object, seed, standoff=(0.001, 0.004)):
	"""
	Synthesizes grasp labels around each object.

	Palms face sampled surface points from a small standoff along the
	outward normal with a random roll, and fingers close until contact.
	Labels that penetrate any scene mesh or the hand itself are dropped.
	"""
	meshes = scene.meshes()
	seeds = util.spawn_seeds(seed, max(1, len(scene.objects)))
	zAxis = np.array([0.0, 0.0, 1.0])
	open_pose = hand.open_pose()

	labels = []
	for instance, objectSeed in zip(scene.objects, seeds):
		rng = np.random.default_rng(objectSeed)
		surface = sample_surface(instance.world_mesh, per_object,
				int(rng.integers(2 ** 32)))

		for p, n in zip(surface.points, surface.normals):
			gap = rng.uniform(*standoff)
			roll = rng.uniform(0.0, 2.0 * np.pi)
			rotation = rotation_between(zAxis, -n) @ _yaw(roll)
			translation = p + gap * n - rotation @ hand.palm_reference_point
			palm = RigidTransform(rotation, translation)

			theta = close_fingers(hand, palm, open_pose, meshes)
			label = GraspLabel.from_matrix(rotation, translation, theta,
					hand.palm_reference_point)

			check = GraspConfig(np.zeros(3), label.palm_pose.translation,
					Rot6D.from_matrix(label.palm_pose.rotation), theta)
			if collision_loss(check, hand, meshes).value > 0:
				continue
			labels.append(label)

	return labels


class DatasetConfig:
	"""
	What generate_dataset builds: scene count, objects per scene, table size,
	labels per object, cloud size, object ids, hand and camera rig.
	"""

	__slots__ = [
			'scene_count',
			'object_count',
			'table_extent',
			'labels_per_object',
			'cloud_size',
			'standard_pose',
			'objects',
			'hand',
			'cameras',
			'seed',
		]

	def __init__(self, scene_count=10, object_count=(3, 5),
			table_extent=(0.6, 0.6), labels_per_object=16,
			cloud_size=C.CLOUD_SIZE, standard_pose=False, objects=None,
			hand="simple-2f", cameras=None, seed=None):
		self.scene_count = dgio.number(scene_count, "scene_count", minimum=1,
				integer=True)
		if len(object_count) != 2:
			raise ConfigError("expected [min, max]", field="object_count")
		low = dgio.number(object_count[0], "object_count", minimum=1,
				integer=True)
		high = dgio.number(object_count[1], "object_count", minimum=low,
				integer=True)
		self.object_count = (low, high)
		self.table_extent = tuple(dgio.vector(table_extent, "table_extent",
				size=2, error=ConfigError))
		if min(self.table_extent) <= 0:
			raise ConfigError("must be positive", field="table_extent")
		self.labels_per_object = dgio.number(labels_per_object,
				"labels_per_object", minimum=1, integer=True)
		self.cloud_size = dgio.number(cloud_size, "cloud_size", minimum=1,
				integer=True)
		if not isinstance(standard_pose, bool):
			raise ConfigError("expected true or false", field="standard_pose")
		self.standard_pose = standard_pose
		self.objects = (primitives.object_ids() if objects is None
				else list(objects))
		for mesh_id in self.objects:
			if mesh_id not in primitives.OBJECTS:
				raise ConfigError("unknown object id {0!r}".format(mesh_id),
						field="objects")
		if not self.objects:
			raise ConfigError("needs at least one object id", field="objects")
		self.hand = hand
		self.cameras = cameras
		self.seed = (None if seed is None
				else dgio.number(seed, "seed", minimum=0, integer=True))

	def __repr__(self):
		return "<{0} scenes={1}>".format(_classname(self), self.scene_count)

	def camera_rig(self):
		if self.cameras is None:
			return default_cameras(self.table_extent)
		try:
			return [CameraSpec.from_dict(c) for c in self.cameras]
		except ValidationError as e:
			raise ConfigError(str(e), field="cameras") from None

	def to_dict(self):
		return {
			"scene_count": self.scene_count,
			"object_count": list(self.object_count),
			"table_extent": list(self.table_extent),
			"labels_per_object": self.labels_per_object,
			"cloud_size": self.cloud_size,
			"standard_pose": self.standard_pose,
			"objects": self.objects,
			"hand": self.hand,
			"cameras": self.cameras,
			"seed": self.seed,
		}

	@classmethod
	def from_dict(cls, document):
		if not isinstance(document, dict):
			raise ConfigError("dataset config must be a JSON object")
		unknown = set(document) - set(cls.__slots__)
		if unknown:
			raise ConfigError("unknown fields {0}".format(sorted(unknown)))
		config = cls(**document)
		config.camera_rig()
		return config


class DatasetRecord:
	__slots__ = ['index', 'scene', 'cloud', 'labels', 'labelset']

	def __init__(self, index, scene, cloud, labels, labelset):
		self.index = index
		self.scene = scene
		self.cloud = cloud
		self.labels = labels
		self.labelset = labelset

	def __repr__(self):
		return "<{0} {1} points={2} labels={3}>".format(_classname(self),
				self.index, len(self.cloud), len(self.labels))


def scene_dir(root, index):
	return os.path.join(root, C.SCENE_DIR.format(index))


def write_record(record, root):
	"""
	Writes one scene directory; returns the cloud checksum.
	"""
	directory = scene_dir(root, record.index)
	os.makedirs(directory, exist_ok=True)

	with open(os.path.join(directory, C.SCENE_FILE), "wt") as out_buf:
		dgio.write_json(record.scene.to_dict(), out_buf)
	with open(os.path.join(directory, C.CLOUD_FILE), "wb") as out_buf:
		checksum = dgio.write_cloud(record.cloud, out_buf)
	with open(os.path.join(directory, C.LABELS_FILE), "wt") as out_buf:
		write_labels(record.labels, out_buf)
	with open(os.path.join(directory, C.LABELSET_FILE), "wt") as out_buf:
		write_labelset(record.labelset, checksum, out_buf)

	return checksum


def read_scene(path):
	with open(path, "rt") as in_buf:
		return Scene.from_dict(dgio.read_json(in_buf))


def generate_scene(config, hand, index, seed):
	"""
	Builds one dataset record: place, label, render and match.
	"""
	rng = np.random.default_rng(seed)
	low, high = config.object_count
	count = int(rng.integers(low, high + 1))
	library = [(mesh_id, primitives.make_object(mesh_id))
			for mesh_id in config.objects]

	scene = place_objects(library, count, config.table_extent,
			int(rng.integers(2 ** 32)), config.standard_pose)
	if not scene.objects:
		raise ValidationError("no object could be placed")

	labels = synth_labels(scene, hand, config.labels_per_object,
			int(rng.integers(2 ** 32)))
	cloud = fuse_point_cloud(scene, config.camera_rig(),
			int(rng.integers(2 ** 32)), config.cloud_size)
	labelset = match_labels(cloud, labels)

	return DatasetRecord(index, scene, cloud, labels, labelset)


def generate_dataset(config, root, seed, hand, progress=False):
	"""
	Generates config.scene_count scenes into root, one directory each.

	Scene seeds are split from seed, so every scene is reproducible on its
	own. A scene that fails is logged and skipped.
	"""
	seeds = util.spawn_seeds(seed, config.scene_count)
	indices = range(config.scene_count)
	if progress:
		indices = util.progress(indices, config.scene_count, "Scenes")

	records = []
	for index in indices:
		try:
			record = generate_scene(config, hand, index, seeds[index])
		except (ValueError, ParseError) as e:
			log.error("scene %d skipped: %s", index, e)
			continue
		write_record(record, root)
		records.append(record)

	return records

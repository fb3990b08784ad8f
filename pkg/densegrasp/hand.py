# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
Multi-fingered hand models: the kinematic tree, forward kinematics with
joint clamping, world placement of the collision and inner point sets, and
the hand description file.
"""
import io
import logging
import os
import pkgutil
import numpy as np
from densegrasp import constants as C
from densegrasp import io as dgio
from densegrasp import primitives
from densegrasp import util
from densegrasp.geom import (RigidTransform, TriMesh, axis_angle_matrix,
		dot_rows, max_signed_distance, sample_triangles)
from densegrasp.validate import (DimensionMismatch, ParseError,
		ValidationError, check_hand, check_joint, check_tree)


log = logging.getLogger(__name__)


def _classname(obj):
	return "{0.__module__}.{0.__name__}".format(type(obj))


class Link:
	"""
	A rigid hand link: its mesh in the link frame and how the file built it.
	"""

	__slots__ = ['name', 'mesh', 'source', 'palm_side']

	def __init__(self, name, mesh, source=None, palm_side=None):
		assert isinstance(mesh, TriMesh)
		self.name = name
		self.mesh = mesh
		# The "shape" or "obj" entry of the hand file, kept for saving.
		self.source = source
		self.palm_side = None if palm_side is None else np.array(palm_side,
				dtype=float)

	def __repr__(self):
		return "<{0} {1!r}>".format(_classname(self), self.name)

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False
		if self.name != other.name or self.mesh != other.mesh: return False
		if (self.palm_side is None) != (other.palm_side is None): return False
		return self.palm_side is None or np.array_equal(self.palm_side,
				other.palm_side)


class JointSpec:
	"""
	A revolute joint between a parent and a child link.

	origin places the joint frame in the parent link frame; the child link
	frame is the joint frame turned by the joint angle about axis. close is
	the direction the finger-closing sweep drives the joint: +1 towards
	limit_max, -1 towards limit_min, 0 never.
	"""

	__slots__ = [
			'name',
			'parent_link',
			'child_link',
			'origin',
			'axis',
			'limit_min',
			'limit_max',
			'close',
			'origin_quaternion',
		]

	def __init__(self, name, parent_link, child_link, origin, axis,
			limit_min, limit_max, close=0, origin_quaternion=None):
		check_joint(name, axis, limit_min, limit_max)
		assert close in (-1, 0, 1)

		self.name = name
		self.parent_link = int(parent_link)
		self.child_link = int(child_link)
		self.origin = origin
		self.axis = np.array(axis, dtype=float)
		self.limit_min = float(limit_min)
		self.limit_max = float(limit_max)
		self.close = close
		# The quaternion as written in the hand file, so saving is exact.
		self.origin_quaternion = (origin.quaternion()
				if origin_quaternion is None
				else np.array(origin_quaternion, dtype=float))

	def __repr__(self):
		return "<{0} {1!r} {2}->{3}>".format(_classname(self), self.name,
				self.parent_link, self.child_link)

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False

		return (self.name == other.name
				and self.parent_link == other.parent_link
				and self.child_link == other.child_link
				and self.origin == other.origin
				and np.array_equal(self.axis, other.axis)
				and self.limit_min == other.limit_min
				and self.limit_max == other.limit_max
				and self.close == other.close)


def sample_collision_points(links, count, seed):
	"""
	Samples count points over all link surfaces, shared out by link area.

	Returns (link indices, link-frame positions).
	"""
	areas = [link.mesh.area for link in links]
	counts = util.apportion(count, areas)
	seeds = util.spawn_seeds(seed, len(links))

	owners = []
	points = []
	for index, (link, n, linkSeed) in enumerate(zip(links, counts, seeds)):
		if not n:
			continue
		cloud, _ = sample_triangles(link.mesh.vertices, link.mesh.faces, n,
				linkSeed)
		owners.append(np.full(n, index))
		points.append(cloud.points)

	return np.concatenate(owners), np.vstack(points)


def sample_inner_points(links, count, seed):
	"""
	Samples count points on the palm-facing surfaces of flagged links.

	A face is palm-facing when its normal is within about 25 degrees of the
	link's palm_side direction.
	"""
	flagged = []
	for index, link in enumerate(links):
		if link.palm_side is None:
			continue
		side = link.palm_side / np.linalg.norm(link.palm_side)
		facing = link.mesh.face_normals @ side > 0.9
		if np.any(facing):
			flagged.append((index, link, facing))

	if not flagged:
		raise ValidationError("no link has palm-facing faces to carry inner "
				"points")

	areas = [link.mesh.face_areas[facing].sum()
			for _, link, facing in flagged]
	counts = util.apportion(count, areas)
	seeds = util.spawn_seeds(seed + 1, len(flagged))

	owners = []
	points = []
	for (index, link, facing), n, linkSeed in zip(flagged, counts, seeds):
		if not n:
			continue
		cloud, _ = sample_triangles(link.mesh.vertices,
				link.mesh.faces[facing], n, linkSeed)
		owners.append(np.full(n, index))
		points.append(cloud.points)

	return np.concatenate(owners), np.vstack(points)


class HandModel:
	"""
	A palm-rooted tree of links connected by revolute joints, with the point
	sets the losses are evaluated on.

	Point sets not given explicitly are sampled from the link meshes with
	sampling_seed, collision_count and inner_count points.
	"""

	__slots__ = [
			'name',
			'links',
			'joints',
			'root',
			'order',
			'palm_reference_point',
			'collision_links',
			'collision_points',
			'inner_links',
			'inner_points',
			'sampling_seed',
			'open_bias',
			'approach_standoff',
			'lower',
			'upper',
			'descendants',
			'adjacent',
		]

	def __init__(self, name, links, joints, palm_reference_point=(0, 0, 0),
			collision=None, inner=None, sampling_seed=0, open_bias=0.0,
			approach_standoff=0.05, collision_count=C.COLLISION_POINT_COUNT,
			inner_count=C.INNER_POINT_COUNT):
		self.name = name
		self.links = list(links)
		self.joints = list(joints)
		self.root, self.order = check_tree(len(self.links),
				[(j.parent_link, j.child_link) for j in self.joints])

		self.palm_reference_point = np.array(palm_reference_point,
				dtype=float)
		self.sampling_seed = int(sampling_seed)
		self.open_bias = float(open_bias)
		self.approach_standoff = float(approach_standoff)

		if collision is None:
			collision = sample_collision_points(self.links, collision_count,
					self.sampling_seed)
		if inner is None:
			inner = sample_inner_points(self.links, inner_count,
					self.sampling_seed)

		self.collision_links = np.array(collision[0], dtype=np.int64)
		self.collision_points = np.array(collision[1],
				dtype=float).reshape(-1, 3)
		self.inner_links = np.array(inner[0], dtype=np.int64)
		self.inner_points = np.array(inner[1], dtype=float).reshape(-1, 3)

		assert len(self.collision_links) == len(self.collision_points)
		assert len(self.inner_links) == len(self.inner_points)

		self.lower = np.array([j.limit_min for j in self.joints])
		self.upper = np.array([j.limit_max for j in self.joints])

		# descendants[j, k]: link k moves with joint j.
		self.descendants = np.zeros((self.dof, len(self.links)), dtype=bool)
		for j in reversed(self.order):
			joint = self.joints[j]
			self.descendants[j, joint.child_link] = True
			for k in self.order:
				if self.joints[k].parent_link == joint.child_link:
					self.descendants[j] |= self.descendants[k]

		self.adjacent = np.eye(len(self.links), dtype=bool)
		for joint in self.joints:
			self.adjacent[joint.parent_link, joint.child_link] = True
			self.adjacent[joint.child_link, joint.parent_link] = True

		for array in (self.collision_links, self.collision_points,
				self.inner_links, self.inner_points, self.lower, self.upper,
				self.descendants, self.adjacent, self.palm_reference_point):
			array.setflags(write=False)

	def __repr__(self):
		return "<{0} {1!r} dof={2}>".format(_classname(self), self.name,
				self.dof)

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False

		return (self.name == other.name
				and self.links == other.links
				and self.joints == other.joints
				and np.array_equal(self.palm_reference_point,
					other.palm_reference_point)
				and np.array_equal(self.collision_links, other.collision_links)
				and np.array_equal(self.collision_points,
					other.collision_points)
				and np.array_equal(self.inner_links, other.inner_links)
				and np.array_equal(self.inner_points, other.inner_points)
				and self.sampling_seed == other.sampling_seed
				and self.open_bias == other.open_bias
				and self.approach_standoff == other.approach_standoff)

	@property
	def dof(self):
		return len(self.joints)

	def link_index(self, name):
		for index, link in enumerate(self.links):
			if link.name == name:
				return index
		raise KeyError(name)

	def close_directions(self):
		return np.array([j.close for j in self.joints])

	def open_pose(self):
		"""
		Joint angles of the open hand.

		Swept joints sit open_bias of their range away from the limit they
		close towards; the others sit mid-range.
		"""
		span = self.upper - self.lower
		close = self.close_directions()
		result = (self.lower + self.upper) / 2.0
		result = np.where(close > 0, self.lower + self.open_bias * span, result)
		result = np.where(close < 0, self.upper - self.open_bias * span, result)
		return result


def _check_theta(hand, theta):
	theta = np.asarray(theta, dtype=float)
	if theta.shape != (hand.dof,):
		raise DimensionMismatch("hand {0!r} has {1} joints, got angles of "
				"shape {2}".format(hand.name, hand.dof, theta.shape))
	return theta


def clamp_joints(hand, theta):
	"""
	Clamps each joint angle into [limit_min, limit_max].
	"""
	theta = _check_theta(hand, theta)
	return np.maximum(np.minimum(theta, hand.upper), hand.lower)


def clamp_mask(hand, theta):
	"""
	1.0 where clamp_joints passes the angle through (limits included), else
	0.0: the derivative of the clamp.
	"""
	theta = _check_theta(hand, theta)
	return ((theta >= hand.lower) & (theta <= hand.upper)).astype(float)


class HandPose:
	"""
	Forward kinematics of one configuration: the world pose of every link,
	plus each joint's world axis and pivot for differentiation.
	"""

	__slots__ = ['palm_pose', 'link_poses', 'axes', 'pivots', '_rotations',
			'_translations']

	def __init__(self, palm_pose, link_poses, axes, pivots):
		self.palm_pose = palm_pose
		self.link_poses = link_poses
		self.axes = axes
		self.pivots = pivots
		self._rotations = np.stack([p.rotation for p in link_poses])
		self._translations = np.stack([p.translation for p in link_poses])

	def transform(self, links, points):
		"""
		Moves link-frame points to the world, each by its link's pose.
		"""
		rotations = self._rotations[links]
		return (np.einsum("nij,nj->ni", rotations, points)
				+ self._translations[links])


def pose_hand(hand, palm_pose, theta):
	"""
	Runs forward kinematics, keeping what the gradients need.

	Each child pose is parent pose ∘ joint origin ∘ rotation(axis, angle).
	"""
	theta = _check_theta(hand, theta)

	poses = [None] * len(hand.links)
	poses[hand.root] = palm_pose
	axes = np.zeros((hand.dof, 3))
	pivots = np.zeros((hand.dof, 3))

	for j in hand.order:
		joint = hand.joints[j]
		frame = poses[joint.parent_link].compose(joint.origin)
		axes[j] = frame.rotation @ joint.axis
		pivots[j] = frame.translation
		turn = RigidTransform(axis_angle_matrix(joint.axis, theta[j]),
				check=False)
		poses[joint.child_link] = frame.compose(turn)

	return HandPose(palm_pose, poses, axes, pivots)


def forward_kinematics(hand, palm_pose, theta):
	"""
	Returns the world pose of every link.
	"""
	return pose_hand(hand, palm_pose, theta).link_poses


def place_hand_points(hand, link_poses):
	"""
	Returns (collision points, inner points) in world coordinates.
	"""
	if isinstance(link_poses, HandPose):
		pose = link_poses
	else:
		pose = HandPose(link_poses[hand.root], list(link_poses),
				np.zeros((hand.dof, 3)), np.zeros((hand.dof, 3)))

	return (pose.transform(hand.collision_links, hand.collision_points),
			pose.transform(hand.inner_links, hand.inner_points))


def point_jacobian(hand, pose, links, world):
	"""
	Returns J of shape (N, 3, 3 + dof): d(world point)/d(palm translation,
	joint angles) for points riding on the given links.
	"""
	world = np.asarray(world, dtype=float).reshape(-1, 3)
	J = np.zeros((len(world), 3, 3 + hand.dof))
	J[:, :, :3] = np.eye(3)

	for j in range(hand.dof):
		moving = hand.descendants[j, links]
		lever = np.cross(pose.axes[j], world - pose.pivots[j])
		J[:, :, 3 + j] = lever * moving[:, None]

	return J


def pullback(hand, pose, links, world, grads):
	"""
	Carries point gradients dL/d(world point) back to the hand parameters.

	Returns (dL/d palm translation, dL/d palm rotation matrix, dL/d joint
	angles). A joint moves each descendant point p by axis × (p - pivot).
	"""
	world = np.asarray(world, dtype=float).reshape(-1, 3)
	grads = np.asarray(grads, dtype=float).reshape(-1, 3)
	palm = pose.palm_pose

	gradTranslation = grads.sum(axis=0)
	palmFrame = (world - palm.translation) @ palm.rotation
	gradRotation = grads.T @ palmFrame

	moment = np.zeros((len(hand.links), 3))
	force = np.zeros((len(hand.links), 3))
	np.add.at(moment, links, np.cross(world, grads))
	np.add.at(force, links, grads)

	jointMoment = hand.descendants @ moment
	jointForce = hand.descendants @ force
	gradTheta = dot_rows(pose.axes,
			jointMoment - np.cross(pose.pivots, jointForce))

	return gradTranslation, gradRotation, gradTheta


def close_fingers(hand, palm_pose, theta, meshes,
		tolerance=C.SWEEP_TOLERANCE):
	"""
	Closes the swept joints until their links touch the meshes.

	Joints are visited parent first. Each swept joint is bisected between
	its current angle and the limit it closes towards until the deepest
	collision point it moves lies within tolerance outside the meshes. A
	joint that reaches its limit without contact stays at the limit; one
	that already penetrates is left alone.
	"""
	theta = clamp_joints(hand, theta).copy()
	close = hand.close_directions()

	def depth(joint, angle):
		trial = theta.copy()
		trial[joint] = angle
		pose = pose_hand(hand, palm_pose, trial)
		moving = hand.descendants[joint, hand.collision_links]
		links = hand.collision_links[moving]
		if not len(links):
			return -np.inf
		world = pose.transform(links, hand.collision_points[moving])
		return max_signed_distance(meshes, world, margin=2 * tolerance)

	for j in hand.order:
		if not close[j]:
			continue

		target = hand.upper[j] if close[j] > 0 else hand.lower[j]
		free = theta[j]
		if depth(j, free) > 0:
			continue

		if depth(j, target) <= 0:
			theta[j] = target
			continue

		blocked = target
		for _ in range(64):
			middle = (free + blocked) / 2.0
			d = depth(j, middle)
			if d > 0:
				blocked = middle
			else:
				free = middle
				if d >= -tolerance:
					break

		theta[j] = free

	return theta


def _vector(value, name, size=3):
	return dgio.vector(value, name, size)


def _link_mesh(entry, name, base_dir):
	if "shape" in entry:
		return primitives.from_spec(entry["shape"])

	if "obj" in entry:
		path = os.path.join(base_dir or ".", entry["obj"])
		try:
			with open(path, "rt") as in_buf:
				return dgio.read_obj(in_buf)
		except OSError as e:
			raise ParseError("cannot read mesh {0!r}: {1}".format(
					path, e.strerror), field=name) from None

	if "mesh" in entry:
		try:
			return TriMesh(entry["mesh"]["vertices"], entry["mesh"]["faces"])
		except (KeyError, TypeError):
			raise ParseError("inline mesh needs vertices and faces",
					field=name) from None

	raise ParseError("link needs one of 'shape', 'obj' or 'mesh'", field=name)


def _point_set(document, key, linkIndex):
	if key not in document:
		return None

	owners = []
	points = []
	for i, entry in enumerate(document[key]):
		field = "{0}[{1}]".format(key, i)
		if not isinstance(entry, list) or len(entry) != 4:
			raise ParseError("expected [link, x, y, z]", field=field)
		if entry[0] not in linkIndex:
			raise ParseError("unknown link {0!r}".format(entry[0]),
					field=field)
		owners.append(linkIndex[entry[0]])
		points.append(_vector(entry[1:], field))

	return np.array(owners, dtype=np.int64), np.array(points).reshape(-1, 3)


def hand_from_dict(document, base_dir=None):
	"""
	Builds a HandModel from a parsed hand description.
	"""
	links = []
	linkIndex = {}
	for i, entry in enumerate(dgio.require(document, "links")):
		field = "links[{0}]".format(i)
		name = dgio.require(entry, "name")
		if name in linkIndex:
			raise ValidationError("duplicate link name {0!r}".format(name))
		palmSide = entry.get("palm_side")
		if palmSide is not None:
			palmSide = _vector(palmSide, field + ".palm_side")
		links.append(Link(name, _link_mesh(entry, field, base_dir),
				source={k: entry[k] for k in ("shape", "obj", "mesh")
					if k in entry},
				palm_side=palmSide))
		linkIndex[name] = i

	joints = []
	for i, entry in enumerate(dgio.require(document, "joints")):
		field = "joints[{0}]".format(i)
		name = dgio.require(entry, "name")
		for key in ("parent", "child"):
			if dgio.require(entry, key) not in linkIndex:
				raise ParseError("unknown link {0!r}".format(entry[key]),
						field="{0}.{1}".format(field, key))

		origin = entry.get("origin", {"translation": [0, 0, 0],
				"quaternion": [0, 0, 0, 1]})
		limits = _vector(dgio.require(entry, "limits"), field + ".limits",
				size=2)
		close = entry.get("close", 0)
		if close not in (-1, 0, 1):
			raise ParseError("close must be -1, 0 or 1",
					field=field + ".close")

		joints.append(JointSpec(
				name,
				linkIndex[entry["parent"]],
				linkIndex[entry["child"]],
				dgio.pose_from_dict(origin, field + ".origin"),
				_vector(dgio.require(entry, "axis"), field + ".axis"),
				limits[0],
				limits[1],
				close,
				_vector(origin["quaternion"], field + ".origin.quaternion",
					size=4),
			))

	return HandModel(
			dgio.require(document, "name"),
			links,
			joints,
			palm_reference_point=_vector(
				document.get("palm_reference_point", [0, 0, 0]),
				"palm_reference_point"),
			collision=_point_set(document, "collision_points", linkIndex),
			inner=_point_set(document, "inner_points", linkIndex),
			sampling_seed=document.get("sampling_seed", 0),
			open_bias=document.get("open_bias", 0.0),
			approach_standoff=document.get("approach_standoff", 0.05),
		)


def hand_to_dict(hand):
	"""
	The hand description of hand, point sets included.
	"""
	def points(links, positions):
		return [[hand.links[k].name] + [float(x) for x in p]
				for k, p in zip(links, positions)]

	links = []
	for link in hand.links:
		entry = {"name": link.name}
		if link.source:
			entry.update(link.source)
		else:
			entry["mesh"] = {
				"vertices": link.mesh.vertices.tolist(),
				"faces": link.mesh.faces.tolist(),
			}
		if link.palm_side is not None:
			entry["palm_side"] = link.palm_side.tolist()
		links.append(entry)

	joints = []
	for joint in hand.joints:
		joints.append({
			"name": joint.name,
			"parent": hand.links[joint.parent_link].name,
			"child": hand.links[joint.child_link].name,
			"origin": {
				"translation": joint.origin.translation.tolist(),
				"quaternion": joint.origin_quaternion.tolist(),
			},
			"axis": joint.axis.tolist(),
			"limits": [joint.limit_min, joint.limit_max],
			"close": joint.close,
		})

	return {
		"name": hand.name,
		"links": links,
		"joints": joints,
		"palm_reference_point": hand.palm_reference_point.tolist(),
		"sampling_seed": hand.sampling_seed,
		"open_bias": hand.open_bias,
		"approach_standoff": hand.approach_standoff,
		"collision_points": points(hand.collision_links,
			hand.collision_points),
		"inner_points": points(hand.inner_links, hand.inner_points),
	}


def read_hand(in_buf, base_dir=None):
	"""
	Reads and validates a hand description.

	in_buf should implement io.IOBase, opened in 'rt' mode.
	"""
	hand = hand_from_dict(dgio.read_json(in_buf), base_dir)
	check_hand(hand)
	return hand


def load_hand(path):
	"""
	Loads a hand file; relative OBJ paths resolve against its directory.
	"""
	with open(path, "rt") as in_buf:
		return read_hand(in_buf, os.path.dirname(os.path.abspath(path)))


def save_hand(hand, path):
	with open(path, "wt") as out_buf:
		dgio.write_json(hand_to_dict(hand), out_buf)


def bundled_hands():
	return ["shadow-like", "simple-2f"]


def find_hand(name):
	"""
	Loads a hand by path, then by name from the directories listed in
	DENSEGRASP_HAND_PATH, then from the bundled hands.
	"""
	if os.path.isfile(name):
		return load_hand(name)

	for directory in os.environ.get(C.HAND_PATH_ENV, "").split(os.pathsep):
		if not directory:
			continue
		candidate = os.path.join(directory, name + ".json")
		if os.path.isfile(candidate):
			log.debug("using hand %s", candidate)
			return load_hand(candidate)

	if name in bundled_hands():
		data = pkgutil.get_data("densegrasp", "data/hands/" + name + ".json")
		return read_hand(io.StringIO(data.decode("utf-8")))

	raise ParseError("no hand named {0!r}; bundled hands: {1}".format(
			name, ", ".join(bundled_hands())))

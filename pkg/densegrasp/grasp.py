# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
The anchored grasp representation, ground-truth grasp labels and dense label
matching on point clouds.
"""
import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation
from densegrasp import constants as C
from densegrasp import io as dgio
from densegrasp import hand as handlib
from densegrasp.geom import (RigidTransform, Rot6D, gram_schmidt_jacobian,
		gram_schmidt_rot6d)
from densegrasp.validate import DimensionMismatch, MissingNormals, ParseError


def _classname(obj):
	return "{0.__module__}.{0.__name__}".format(type(obj))


def palm_translation(anchor, offset):
	return np.asarray(anchor, dtype=float) + np.asarray(offset, dtype=float)


class GraspConfig:
	"""
	A grasp attached to a cloud point: palm translation anchor + offset, palm
	rotation from the 6D pair rot, and joint angles theta.

	The anchor is fixed; the other fields form the optimization vector
	[offset, a, b, theta].
	"""

	__slots__ = ['anchor', 'offset', 'rot', 'theta']

	def __init__(self, anchor, offset, rot, theta):
		self.anchor = np.array(anchor, dtype=float)
		self.offset = np.array(offset, dtype=float)
		self.rot = rot
		self.theta = np.array(theta, dtype=float)

		assert self.anchor.shape == (3,) and self.offset.shape == (3,)
		assert self.theta.ndim == 1

	def __repr__(self):
		return "<{0} anchor={1!r} offset={2!r}>".format(_classname(self),
				self.anchor.tolist(), self.offset.tolist())

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False

		return (np.array_equal(self.anchor, other.anchor)
				and np.array_equal(self.flatten(), other.flatten()))

	@property
	def dimension(self):
		return 9 + len(self.theta)

	def flatten(self):
		return np.concatenate([self.offset, self.rot.a, self.rot.b,
				self.theta])

	@classmethod
	def unflatten(cls, x, anchor):
		x = np.asarray(x, dtype=float)
		if x.ndim != 1 or len(x) < 9:
			raise DimensionMismatch("grasp vectors have 9 + dof entries, "
					"got shape {0}".format(x.shape))
		return cls(anchor, x[0:3], Rot6D(x[3:6], x[6:9]), x[9:])

	def is_degenerate(self):
		return self.rot.is_degenerate()

	def with_vector(self, x):
		return GraspConfig.unflatten(x, self.anchor)


def grasp_to_pose(g, hand):
	"""
	Returns (palm pose, clamped joint angles) for a grasp.
	"""
	palm = RigidTransform(gram_schmidt_rot6d(g.rot),
			palm_translation(g.anchor, g.offset))
	return palm, handlib.clamp_joints(hand, g.theta)


class GraspState:
	"""
	A grasp pushed through the hand model, with what it takes to carry
	gradients on world points back to the grasp vector.
	"""

	__slots__ = [
			'grasp',
			'hand',
			'palm_pose',
			'theta',
			'mask',
			'rotation_jacobian',
			'pose',
			'collision_world',
			'inner_world',
		]

	def __init__(self, g, hand):
		self.grasp = g
		self.hand = hand
		self.palm_pose, self.theta = grasp_to_pose(g, hand)
		self.mask = handlib.clamp_mask(hand, g.theta)
		self.rotation_jacobian = gram_schmidt_jacobian(g.rot)
		self.pose = handlib.pose_hand(hand, self.palm_pose, self.theta)
		self.collision_world, self.inner_world = handlib.place_hand_points(
				hand, self.pose)

	def pullback(self, links, world, grads):
		"""
		Returns dL/d(grasp vector) given dL/d(world point) for points riding
		on the given links.
		"""
		gradTranslation, gradRotation, gradTheta = handlib.pullback(
				self.hand, self.pose, links, world, grads)
		gradRot6d = np.einsum("ij,ijk->k", gradRotation,
				self.rotation_jacobian)

		return np.concatenate([gradTranslation, gradRot6d,
				gradTheta * self.mask])

	def collision_pullback(self, grads):
		return self.pullback(self.hand.collision_links, self.collision_world,
				grads)

	def inner_pullback(self, grads):
		return self.pullback(self.hand.inner_links, self.inner_world, grads)


class GraspLabel:
	"""
	A ground-truth grasp: palm pose and joint angles in the world frame.
	"""

	__slots__ = ['palm_pose', 'theta', 'palm_reference_world', 'quaternion']

	def __init__(self, palm_pose, theta, palm_reference_point, quaternion=None):
		self.palm_pose = palm_pose
		self.theta = np.array(theta, dtype=float)
		self.palm_reference_world = palm_pose.apply(palm_reference_point)
		self.quaternion = (palm_pose.quaternion() if quaternion is None
				else np.array(quaternion, dtype=float))

	@classmethod
	def from_quaternion(cls, translation, quaternion, theta,
			palm_reference_point):
		"""
		Builds a label whose pose is exactly what its file line will hold.
		"""
		quaternion = np.asarray(quaternion, dtype=float)
		pose = RigidTransform.from_quaternion(translation, quaternion)
		return cls(pose, theta, palm_reference_point, quaternion)

	@classmethod
	def from_matrix(cls, rotation, translation, theta, palm_reference_point):
		quaternion = Rotation.from_matrix(rotation).as_quat()
		return cls.from_quaternion(translation, quaternion, theta,
				palm_reference_point)

	def __repr__(self):
		return "<{0} reference={1!r}>".format(_classname(self),
				self.palm_reference_world.tolist())

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False

		return (self.palm_pose == other.palm_pose
				and np.array_equal(self.theta, other.theta)
				and np.array_equal(self.palm_reference_world,
					other.palm_reference_world))

	def to_vector(self, anchor):
		"""
		The label in grasp-vector form relative to anchor.
		"""
		R = self.palm_pose.rotation
		return np.concatenate([self.palm_pose.translation - anchor, R[:, 0],
				R[:, 1], self.theta])

	def to_dict(self):
		return {
			"translation": [float(x) for x in self.palm_pose.translation],
			"quaternion": [float(x) for x in self.quaternion],
			"theta": [float(x) for x in self.theta],
		}

	@classmethod
	def from_dict(cls, document, hand, line=None):
		try:
			translation = dgio.vector(dgio.require(document, "translation"),
					"translation")
			quaternion = dgio.vector(dgio.require(document, "quaternion"),
					"quaternion", size=4)
			theta = dgio.vector(dgio.require(document, "theta"), "theta",
					size=hand.dof)
		except ParseError as e:
			raise ParseError(e.detail, line=line, field=e.field) from None

		return cls.from_quaternion(translation, quaternion, theta,
				hand.palm_reference_point)


def read_labels(in_buf, hand):
	"""
	Returns the labels of a JSON-lines label file, one label per line.

	in_buf should implement io.IOBase, opened in 'rt' mode.
	"""
	return [GraspLabel.from_dict(record, hand, line=lineno)
			for lineno, record in dgio.read_jsonl(in_buf)]


def write_labels(labels, out_buf):
	dgio.write_jsonl((label.to_dict() for label in labels), out_buf)


class LabelSet:
	"""
	The labels matched to each point of a cloud.

	matches[i] lists, in ascending order, the indices into labels of the
	grasps matched to point i.
	"""

	__slots__ = ['labels', 'matches']

	def __init__(self, labels, matches):
		self.labels = list(labels)
		self.matches = [list(m) for m in matches]

	def __len__(self):
		return len(self.matches)

	def __repr__(self):
		return "<{0} points={1} positive={2}>".format(_classname(self),
				len(self), int(self.flags.sum()))

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False
		return self.matches == other.matches and self.labels == other.labels

	@property
	def flags(self):
		return np.array([bool(m) for m in self.matches], dtype=bool)

	def at(self, index):
		return [self.labels[k] for k in self.matches[index]]

	def to_dict(self, cloud_checksum):
		return {
			"cloud_checksum": cloud_checksum,
			"label_count": len(self.labels),
			"matches": self.matches,
		}

	@classmethod
	def from_dict(cls, document, labels):
		matches = dgio.require(document, "matches")
		count = dgio.require(document, "label_count")
		if count != len(labels):
			raise ParseError("label set refers to {0} labels, the label file "
					"has {1}".format(count, len(labels)), field="label_count")
		for i, m in enumerate(matches):
			if any(not 0 <= k < len(labels) for k in m):
				raise ParseError("label index out of range",
						field="matches[{0}]".format(i))
		return cls(labels, matches)


def match_labels(cloud, labels, radius=C.MATCH_RADIUS):
	"""
	Matches grasp labels to cloud points.

	A label matches point i when its palm reference point lies within radius
	of the point and on the outer side of the point's normal.
	"""
	if cloud.normals is None:
		raise MissingNormals("label matching needs cloud normals")

	matches = [[] for _ in range(len(cloud))]
	if not labels or not len(cloud):
		return LabelSet(labels, matches)

	references = np.array([label.palm_reference_world for label in labels])
	tree = cKDTree(references)
	near = tree.query_ball_point(cloud.points, radius + 1e-9)

	for i, candidates in enumerate(near):
		if not candidates:
			continue

		candidates = np.sort(np.asarray(candidates, dtype=np.int64))
		diff = references[candidates] - cloud.points[i]
		normal = cloud.normals[i]
		distance = np.sqrt(diff[:, 0] * diff[:, 0] + diff[:, 1] * diff[:, 1]
				+ diff[:, 2] * diff[:, 2])
		along = (normal[0] * diff[:, 0] + normal[1] * diff[:, 1]
				+ normal[2] * diff[:, 2])

		keep = (distance <= radius) & (along > 0)
		matches[i] = candidates[keep].tolist()

	return LabelSet(labels, matches)


def read_labelset(in_buf, labels):
	"""
	Returns (label set, cloud checksum) from a label set file.
	"""
	document = dgio.read_json(in_buf)
	return (LabelSet.from_dict(document, labels),
			dgio.require(document, "cloud_checksum"))


def write_labelset(labelset, cloud_checksum, out_buf):
	dgio.write_json(labelset.to_dict(cloud_checksum), out_buf)

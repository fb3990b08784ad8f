# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
Exceptions and structural checks shared by the densegrasp modules.
"""
import numpy as np
from densegrasp import constants as C


class DegenerateRotation(ValueError):
	"""
	Raised when a 6D rotation cannot be turned into a rotation matrix.
	"""
	pass


class InvalidK(ValueError):
	"""
	Raised when a subset size is out of range for its point set.
	"""
	pass


class DimensionMismatch(ValueError):
	pass


class ParseError(ValueError):
	"""
	Raised when a file does not follow its documented format.

	line and field locate the problem, when known.
	"""

	def __init__(self, message, line=None, field=None):
		self.detail = message
		if line is not None:
			message = "line {0}: {1}".format(line, message)
		if field is not None:
			message = "field {0!r}: {1}".format(field, message)
		super().__init__(message)
		self.line = line
		self.field = field


class ValidationError(ValueError):
	"""
	Raised when a model parses but violates a structural invariant.
	"""
	pass


class MissingNormals(ValueError):
	pass


class EmptyLabelSet(ValueError):
	pass


class NonPositiveConfidence(ValueError):
	pass


class NoStableFace(ValueError):
	pass


class EmptyView(ValueError):
	"""
	Raised when no camera sees any object pixel.
	"""
	pass


class TooFewPoints(ValueError):
	pass


class ConfigError(ParseError):
	"""
	Raised when a configuration document has a missing or invalid field.
	"""
	pass


class DanglingReference(ValueError):
	"""
	Raised when results refer to scenes missing from the dataset.
	"""
	pass


def check_tree(link_count, edges):
	"""
	Returns (root, order) for a kinematic tree, or raises ValidationError.

	edges is a sequence of (parent, child) link indices, one per joint. order
	lists joint indices so that every joint comes after the joint that moves
	its parent link.
	"""
	if link_count < 1:
		raise ValidationError("a hand needs at least one link")

	if len(edges) != link_count - 1:
		raise ValidationError("{0} links need {1} joints to form a tree, "
				"got {2}".format(link_count, link_count - 1, len(edges)))

	parentJoint = {}
	for index, (parent, child) in enumerate(edges):
		for link in (parent, child):
			if not 0 <= link < link_count:
				raise ValidationError("joint {0} refers to unknown link "
						"{1}".format(index, link))
		if parent == child:
			raise ValidationError("joint {0} connects link {1} to "
					"itself".format(index, parent))
		if child in parentJoint:
			raise ValidationError("link {0} has more than one parent "
					"joint".format(child))
		parentJoint[child] = index

	roots = [link for link in range(link_count) if link not in parentJoint]
	if len(roots) != 1:
		raise ValidationError("joint graph has a cycle or no unique root "
				"(roots: {0!r})".format(roots))
	root = roots[0]

	children = {}
	for index, (parent, child) in enumerate(edges):
		children.setdefault(parent, []).append(index)

	order = []
	frontier = [root]
	while frontier:
		link = frontier.pop(0)
		for joint in children.get(link, []):
			order.append(joint)
			frontier.append(edges[joint][1])

	if len(order) != len(edges):
		raise ValidationError("joint graph has a cycle: only {0} of {1} "
				"joints are reachable from the root".format(
					len(order), len(edges)))

	return root, order


def check_joint(name, axis, limit_min, limit_max):
	"""
	Raises ValidationError if a joint axis or its limits are unusable.
	"""
	axis = np.asarray(axis, dtype=float)
	if axis.shape != (3,) or not np.all(np.isfinite(axis)):
		raise ValidationError("joint {0!r} needs a finite 3-vector "
				"axis".format(name))
	if abs(np.linalg.norm(axis) - 1.0) > C.UNIT_TOLERANCE:
		raise ValidationError("joint {0!r} axis must have unit length, "
				"not {1!r}".format(name, float(np.linalg.norm(axis))))
	if not (np.isfinite(limit_min) and np.isfinite(limit_max)):
		raise ValidationError("joint {0!r} limits must be finite".format(name))
	if limit_min > limit_max:
		raise ValidationError("joint {0!r} has limit_min {1!r} above "
				"limit_max {2!r}".format(name, limit_min, limit_max))


def check_hand(hand):
	"""
	Checks the point-set sizes a hand file must provide.
	"""
	if len(hand.collision_points) != C.COLLISION_POINT_COUNT:
		raise ValidationError("hand {0!r} needs {1} collision points, "
				"not {2}".format(hand.name, C.COLLISION_POINT_COUNT,
					len(hand.collision_points)))

	if len(hand.inner_points) != C.INNER_POINT_COUNT:
		raise ValidationError("hand {0!r} needs {1} inner points, "
				"not {2}".format(hand.name, C.INNER_POINT_COUNT,
					len(hand.inner_points)))

	for label, links in (
			("collision", hand.collision_links),
			("inner", hand.inner_links),
		):
		if len(links) and (links.min() < 0 or links.max() >= len(hand.links)):
			raise ValidationError("{0} point refers to an unknown "
					"link".format(label))

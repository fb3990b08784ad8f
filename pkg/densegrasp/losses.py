# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
The differentiable grasp losses and their gradients with respect to the
grasp vector [offset, a, b, theta], plus a finite-difference checker.
"""
import functools
import logging
import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.stats import norm, qmc
from densegrasp import constants as C
from densegrasp import io as dgio
from densegrasp.geom import dot_rows, perpendicular_basis
from densegrasp.grasp import GraspState
from densegrasp.validate import (ConfigError, DimensionMismatch,
		EmptyLabelSet, NonPositiveConfidence)


log = logging.getLogger(__name__)

# Relative mismatch between the h and 2h difference stencils that marks a
# kink in the gradient check.
_SMOOTH_TOLERANCE = 1e-6


def _classname(obj):
	return "{0.__module__}.{0.__name__}".format(type(obj))


class LossWeights:
	"""
	Weights of the chamfer, collision, guidance, Q1 and confidence terms.

	Unset weights take the fine-tuning defaults, which leave Q1 out.
	"""

	__slots__ = ['w1', 'w2', 'w3', 'w4', 'w5']

	def __init__(self, w1=None, w2=None, w3=None, w4=None, w5=None):
		given = (w1, w2, w3, w4, w5)
		for name, value, default in zip(self.__slots__, given,
				C.DEFAULT_WEIGHTS):
			value = default if value is None else value
			setattr(self, name, dgio.number(value, name, minimum=0.0))

	def __repr__(self):
		return "<{0} {1!r}>".format(_classname(self), self.as_tuple())

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False
		return self.as_tuple() == other.as_tuple()

	def as_tuple(self):
		return (self.w1, self.w2, self.w3, self.w4, self.w5)

	def to_dict(self):
		return dict(zip(self.__slots__, self.as_tuple()))

	@classmethod
	def from_dict(cls, document):
		if isinstance(document, list):
			if len(document) != 5:
				raise ConfigError("expected 5 weights", field="weights")
			return cls(*document)
		unknown = set(document) - set(cls.__slots__)
		if unknown:
			raise ConfigError("unknown weights {0}".format(sorted(unknown)),
					field="weights")
		return cls(**document)


class ContactParams:
	"""
	The contact and wrench-space model of the Q1 upper bound.

	torque_scale and com left as None are filled from the target mesh by
	resolve: 1 / bounding radius about the center of mass, and the center of
	mass itself.
	"""

	__slots__ = [
			'friction_mu',
			'cone_edges',
			'torque_scale',
			'contact_threshold',
			'directions',
			'direction_seed',
			'com',
		]

	def __init__(self, friction_mu=C.FRICTION_MU, cone_edges=C.CONE_EDGES,
			torque_scale=None, contact_threshold=C.CONTACT_THRESHOLD,
			directions=C.DIRECTION_COUNT, direction_seed=0, com=None):
		self.friction_mu = dgio.number(friction_mu, "friction_mu")
		self.cone_edges = dgio.number(cone_edges, "cone_edges", minimum=3,
				integer=True)
		self.torque_scale = (None if torque_scale is None
				else dgio.number(torque_scale, "torque_scale"))
		self.contact_threshold = dgio.number(contact_threshold,
				"contact_threshold")
		self.directions = dgio.number(directions, "directions", minimum=1,
				integer=True)
		self.direction_seed = dgio.number(direction_seed, "direction_seed",
				minimum=0, integer=True)
		self.com = (None if com is None
				else dgio.vector(com, "com", error=ConfigError))

		if self.friction_mu <= 0:
			raise ConfigError("must be positive", field="friction_mu")
		if self.contact_threshold <= 0:
			raise ConfigError("must be positive", field="contact_threshold")
		if self.torque_scale is not None and self.torque_scale <= 0:
			raise ConfigError("must be positive", field="torque_scale")

	def __repr__(self):
		return "<{0} mu={1!r} E={2} D={3}>".format(_classname(self),
				self.friction_mu, self.cone_edges, self.directions)

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False
		return self.to_dict() == other.to_dict()

	def replace(self, **changes):
		fields = self.to_dict()
		fields.update(changes)
		return ContactParams(**fields)

	def resolve(self, mesh):
		com = mesh.center_mass if self.com is None else self.com
		scale = self.torque_scale
		if scale is None:
			scale = 1.0 / mesh.bounding_radius(com)
		return self.replace(com=com, torque_scale=scale)

	def to_dict(self):
		return {
			"friction_mu": self.friction_mu,
			"cone_edges": self.cone_edges,
			"torque_scale": self.torque_scale,
			"contact_threshold": self.contact_threshold,
			"directions": self.directions,
			"direction_seed": self.direction_seed,
			"com": None if self.com is None else [float(x) for x in self.com],
		}

	@classmethod
	def from_dict(cls, document):
		unknown = set(document) - set(cls.__slots__)
		if unknown:
			raise ConfigError("unknown fields {0}".format(sorted(unknown)),
					field="contact")
		return cls(**document)


class DiffValue:
	"""
	A scalar loss with its gradient.

	selection records every discrete choice made while evaluating it
	(closest faces, argmin labels, selected wrenches); where it changes the
	loss is not differentiable.
	"""

	__slots__ = ['value', 'gradient', 'selection']

	def __init__(self, value, gradient, selection=()):
		self.value = float(value)
		self.gradient = np.asarray(gradient, dtype=float)
		self.selection = tuple(selection)

	def __repr__(self):
		return "<{0} value={1!r}>".format(_classname(self), self.value)

	def __add__(self, other):
		return DiffValue(self.value + other.value,
				self.gradient + other.gradient,
				self.selection + other.selection)

	def __mul__(self, scale):
		return DiffValue(scale * self.value, scale * self.gradient,
				self.selection)

	__rmul__ = __mul__

	@classmethod
	def zero(cls, size):
		return cls(0.0, np.zeros(size))


def _state(g, hand):
	return g if isinstance(g, GraspState) else GraspState(g, hand)


def collision_loss(g, hand, meshes, self_collision=True):
	"""
	Mean squared penetration of the collision points into the scene meshes
	and, with self_collision, into the hand's own links.

	A point is never tested against its own link or the links jointed to
	it. The mean runs over points × scene meshes; penetration into the
	hand's own links adds to the sum without widening the mean.
	"""
	state = _state(g, hand)
	points = state.collision_world
	links = hand.collision_links
	scale = 1.0 / (len(points) * max(1, len(meshes)))

	value = 0.0
	grads = np.zeros_like(points)
	extraLinks = []
	extraWorld = []
	extraGrads = []
	selection = []

	for m, mesh in enumerate(meshes):
		near = np.nonzero(mesh.in_bounds(points))[0]
		if not len(near):
			continue
		proximity = mesh.query(points[near])
		inside = proximity.signed > 0
		if not np.any(inside):
			continue
		depth = proximity.signed[inside]
		value += float(np.sum(depth * depth))
		grads[near[inside]] += (2.0 * depth[:, None]
				* proximity.gradient()[inside])
		selection.append(("mesh", m, tuple(near[inside].tolist()),
				tuple(proximity.face[inside].tolist())))

	if self_collision:
		for k, link in enumerate(hand.links):
			candidates = np.nonzero(~hand.adjacent[k, links])[0]
			if not len(candidates):
				continue
			pose = state.pose.link_poses[k]
			local = (points[candidates] - pose.translation) @ pose.rotation
			inBox = link.mesh.in_bounds(local)
			near = candidates[inBox]
			if not len(near):
				continue
			proximity = link.mesh.query(local[inBox])
			inside = proximity.signed > 0
			if not np.any(inside):
				continue
			depth = proximity.signed[inside]
			value += float(np.sum(depth * depth))
			pointGrads = (2.0 * depth[:, None]
					* pose.apply_vectors(proximity.gradient()[inside]))
			hit = near[inside]
			grads[hit] += pointGrads
			# Moving link k against a point is moving the point against k.
			extraLinks.append(np.full(len(hit), k))
			extraWorld.append(points[hit])
			extraGrads.append(-pointGrads)
			selection.append(("link", k, tuple(hit.tolist()),
					tuple(proximity.face[inside].tolist())))

	gradient = state.collision_pullback(grads)
	if extraLinks:
		gradient = gradient + state.pullback(np.concatenate(extraLinks),
				np.vstack(extraWorld), np.vstack(extraGrads))

	return DiffValue(scale * value, scale * gradient,
			[("collision",) + tuple(selection)])


def guidance_loss(g, hand, meshes):
	"""
	Sum of squared distances from the inner points to the nearest surface
	of any of the meshes, taken together as one.

	The nearest surface point is held fixed when differentiating.
	"""
	state = _state(g, hand)
	points = state.inner_world

	best = np.full(len(points), np.inf)
	closest = np.zeros_like(points)
	owner = np.full(len(points), -1)
	face = np.full(len(points), -1)

	bounds = [mesh.box_distance2(points) for mesh in meshes]
	for m in sorted(range(len(meshes)), key=lambda m: bounds[m].min()):
		# Ties go to the lower mesh index whatever the visiting order.
		rows = np.nonzero(bounds[m] <= best)[0]
		if not len(rows):
			continue
		q, f, _, d2 = meshes[m].closest_points(points[rows])
		better = (d2 < best[rows]) | ((d2 == best[rows]) & (m < owner[rows]))
		rows, q, f, d2 = rows[better], q[better], f[better], d2[better]
		best[rows] = d2
		closest[rows] = q
		owner[rows] = m
		face[rows] = f

	diff = points - closest
	value = float(np.sum(dot_rows(diff, diff)))
	gradient = state.inner_pullback(2.0 * diff)

	return DiffValue(value, gradient,
			[("guidance", tuple(owner.tolist()), tuple(face.tolist()))])


def chamfer_loss(g, matched, hand=None):
	"""
	Squared distance in grasp-vector space to the nearest matched label.
	"""
	if not matched:
		raise EmptyLabelSet("chamfer loss needs at least one matched label")

	grasp = g.grasp if isinstance(g, GraspState) else g
	x = grasp.flatten()
	targets = np.array([label.to_vector(grasp.anchor) for label in matched])
	if targets.shape[1] != len(x):
		raise DimensionMismatch("labels have {0} entries, the grasp vector "
				"{1}".format(targets.shape[1], len(x)))

	distances = np.sum((targets - x) ** 2, axis=1)
	nearest = int(np.argmin(distances))

	return DiffValue(distances[nearest], 2.0 * (x - targets[nearest]),
			[("chamfer", nearest)])


class Contact:
	"""
	A hand collision point touching the target, with the target's outward
	normal at the touch point.
	"""

	__slots__ = ['point', 'normal', 'index', 'link']

	def __init__(self, point, normal, index=-1, link=-1):
		self.point = np.array(point, dtype=float)
		self.normal = np.array(normal, dtype=float)
		self.index = int(index)
		self.link = int(link)

	def __repr__(self):
		return "<{0} point={1!r}>".format(_classname(self),
				self.point.tolist())


def find_contacts(g, hand, mesh, params):
	"""
	Collision points within contact_threshold of the mesh surface.

	Candidates are taken nearest first; one closer than contact_threshold to
	a contact already taken is dropped.
	"""
	state = _state(g, hand)
	points = state.collision_world
	threshold = params.contact_threshold

	near = np.nonzero(mesh.in_bounds(points, margin=threshold))[0]
	if not len(near):
		return []

	proximity = mesh.query(points[near])
	touching = np.abs(proximity.signed) <= threshold
	near = near[touching]
	gap = np.abs(proximity.signed[touching])
	normals = proximity.normal[touching]

	contacts = []
	for i in np.lexsort((near, gap)):
		p = points[near[i]]
		if any(np.linalg.norm(p - c.point) < threshold for c in contacts):
			continue
		contacts.append(Contact(p, normals[i], near[i],
				hand.collision_links[near[i]]))

	return contacts


@functools.lru_cache(maxsize=16)
def _sobol_directions(count, seed):
	m = max(0, int(np.ceil(np.log2(count))))
	sampler = qmc.Sobol(d=6, scramble=True, seed=seed)
	u = sampler.random_base2(m)[:count]
	s = norm.ppf(np.clip(u, 1e-12, 1.0 - 1e-12))
	s /= np.linalg.norm(s, axis=1)[:, None]
	s.setflags(write=False)
	return s


def wrench_directions(count, seed=0):
	"""
	count unit directions in wrench space from a scrambled Sobol sequence.

	With the same seed, a smaller set is a prefix of a larger one.
	"""
	return _sobol_directions(int(count), int(seed))


def cone_edges(normal, mu, edges):
	"""
	Forces along the edges of the friction cone pushing into a surface with
	outward normal: unit normal part, tangential part mu.
	"""
	t1, t2 = perpendicular_basis(normal)
	angle = 2.0 * np.pi * np.arange(edges) / edges
	return (-np.asarray(normal)[None]
			+ mu * (np.cos(angle)[:, None] * t1 + np.sin(angle)[:, None] * t2))


def contact_wrenches(contacts, params):
	"""
	Returns (wrenches, contact of each wrench, edge forces) for the contact
	set; torques are taken about params.com and scaled by torque_scale.
	"""
	com = np.zeros(3) if params.com is None else params.com
	scale = 1.0 if params.torque_scale is None else params.torque_scale

	forces = []
	owners = []
	wrenches = []
	for c, contact in enumerate(contacts):
		f = cone_edges(contact.normal, params.friction_mu, params.cone_edges)
		torque = scale * np.cross(contact.point - com, f)
		forces.append(f)
		owners.append(np.full(len(f), c))
		wrenches.append(np.hstack([f, torque]))

	return np.vstack(wrenches), np.concatenate(owners), np.vstack(forces)


def q1_upper(contacts, params, state=None, directions=None):
	"""
	The upper bound on the Q1 grasp metric: the smallest support value of
	the contact wrench set over a set of directions, clamped at zero.

	The gradient is taken with respect to the grasp vector when a grasp state
	is given, else with respect to the stacked contact points.
	"""
	size = len(state.grasp.flatten()) if state is not None else 3 * len(
			contacts)
	if not contacts:
		return DiffValue(0.0, np.zeros(size), [("q1", "empty")])

	if directions is None:
		directions = wrench_directions(params.directions,
				params.direction_seed)
	directions = np.asarray(directions, dtype=float)

	wrenches, owners, forces = contact_wrenches(contacts, params)
	support = directions @ wrenches.T
	best = np.argmax(support, axis=1)
	heights = support[np.arange(len(directions)), best]
	j = int(np.argmin(heights))
	k = int(best[j])
	value = heights[j]
	selection = [("q1", tuple(c.index for c in contacts), j, k)]

	if value <= 0:
		return DiffValue(0.0, np.zeros(size), selection)

	scale = 1.0 if params.torque_scale is None else params.torque_scale
	c = int(owners[k])
	pointGrad = scale * np.cross(forces[k], directions[j, 3:])

	if state is None:
		gradient = np.zeros(size)
		gradient[3 * c:3 * c + 3] = pointGrad
	else:
		contact = contacts[c]
		gradient = state.pullback(np.array([contact.link]),
				contact.point[None], pointGrad[None])

	return DiffValue(value, gradient, selection)


def q1_loss(q):
	value = np.exp(-q.value)
	return DiffValue(value, -value * q.gradient, q.selection)


def q1_exact(contacts, params):
	"""
	Q1 itself: the distance from the origin to the boundary of the convex
	hull of the contact wrenches, zero unless the hull strictly contains
	the origin. q1_upper tends to this as its directions grow dense.
	"""
	if not contacts:
		return 0.0

	wrenches, _, _ = contact_wrenches(contacts, params)
	try:
		hull = ConvexHull(wrenches)
	except (QhullError, ValueError):
		return 0.0

	offsets = hull.equations[:, -1]
	if np.any(offsets >= 0):
		return 0.0
	return float(np.min(-offsets))


def reference_q1(params):
	"""
	Q1 upper bound of two antipodal contacts on the unit sphere about the
	origin, under params' friction model, over a dense direction set.

	The pair cannot resist torque about the line through both contacts, so
	the bound only shrinks as directions are added; the count is fixed to
	keep the value reproducible.
	"""
	contacts = [
		Contact([1.0, 0.0, 0.0], [1.0, 0.0, 0.0]),
		Contact([-1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]),
	]
	fixture = params.replace(com=[0.0, 0.0, 0.0], torque_scale=1.0,
			directions=C.REFERENCE_DIRECTION_COUNT)
	return q1_upper(contacts, fixture).value


def nearest_mesh(meshes, point):
	distances = [abs(m.query(point).signed[0]) for m in meshes]
	return meshes[int(np.argmin(distances))]


def task_loss(g, matched, hand, meshes, weights, params, guide=None,
		target=None, self_collision=True):
	"""
	The weighted sum w1 chamfer + w2 collision + w3 guidance + w4 Q1 loss.

	meshes are all scene meshes; guide are those the inner points are drawn
	to (default all of them); target is the grasped mesh for the Q1 term
	(default the guide mesh nearest the anchor). Terms with zero weight are
	skipped, as is the chamfer term when no label is matched.
	"""
	state = _state(g, hand)
	guide = meshes if guide is None else guide
	total = DiffValue.zero(len(state.grasp.flatten()))

	if weights.w1 and matched:
		total = total + weights.w1 * chamfer_loss(state, matched, hand)
	if weights.w2:
		total = total + weights.w2 * collision_loss(state, hand, meshes,
				self_collision)
	if weights.w3 and guide:
		total = total + weights.w3 * guidance_loss(state, hand, guide)
	if weights.w4:
		if target is None:
			target = nearest_mesh(guide, state.grasp.anchor)
		resolved = params.resolve(target)
		contacts = find_contacts(state, hand, target, resolved)
		total = total + weights.w4 * q1_loss(q1_upper(contacts, resolved,
				state))

	return total


def confidence_joint_loss(losses, confidences, w5, batch_size=1):
	"""
	(1/B)(1/m) Σ c_i L_i - w5 log c_i over m points.
	"""
	losses = np.asarray(losses, dtype=float)
	confidences = np.asarray(confidences, dtype=float)

	if losses.shape != confidences.shape or losses.ndim != 1:
		raise DimensionMismatch("{0} losses but {1} confidences".format(
				losses.shape, confidences.shape))
	if not len(losses):
		raise DimensionMismatch("need at least one point")
	if np.any(confidences <= 0) or np.any(confidences > 1):
		raise NonPositiveConfidence("confidences must lie in (0, 1], got "
				"{0!r}".format(confidences[(confidences <= 0)
					| (confidences > 1)][:3].tolist()))

	terms = confidences * losses - w5 * np.log(confidences)
	return float(np.sum(terms) / len(terms) / batch_size)


class GradientReport:
	"""
	Central finite differences against the analytic gradient.

	boundary lists the coordinates where f switched discrete choices and
	kinked within ±h of the base point; they are excluded from max_error.
	"""

	__slots__ = ['analytic', 'numeric', 'errors', 'boundary', 'value']

	def __init__(self, value, analytic, numeric, errors, boundary):
		self.value = value
		self.analytic = analytic
		self.numeric = numeric
		self.errors = errors
		self.boundary = boundary

	def __repr__(self):
		return "<{0} max_error={1:.3g} boundary={2!r}>".format(
				_classname(self), self.max_error, self.boundary)

	@property
	def at_boundary(self):
		return bool(self.boundary)

	@property
	def max_error(self):
		mask = np.ones(len(self.errors), dtype=bool)
		mask[self.boundary] = False
		return float(self.errors[mask].max()) if np.any(mask) else 0.0

	def worst(self):
		"""
		Index of the worst non-boundary coordinate, or None.
		"""
		errors = self.errors.copy()
		errors[self.boundary] = -1.0
		index = int(np.argmax(errors))
		return index if errors[index] >= 0 else None

	def passed(self, tolerance=1e-4):
		return self.max_error < tolerance


def gradient_check(f, g, h=1e-5):
	"""
	Checks f's analytic gradient at grasp g by central differences.

	f maps a GraspConfig to a DiffValue. A coordinate whose ±h evaluations
	make different discrete choices than the base point is re-sampled at
	±2h; it counts as a boundary only if the two stencils show a kink, so
	switches that leave f smooth (a nearest face changing over a convex
	surface, say) are still checked.
	"""
	base = f(g)
	x = g.flatten()
	numeric = np.zeros(len(x))
	boundary = []

	for i in range(len(x)):
		step = np.zeros(len(x))
		step[i] = h
		plus = f(g.with_vector(x + step))
		minus = f(g.with_vector(x - step))
		numeric[i] = (plus.value - minus.value) / (2.0 * h)
		if any(s.selection != base.selection for s in (plus, minus)):
			wide = (f(g.with_vector(x + 2.0 * step)).value,
					f(g.with_vector(x - 2.0 * step)).value)
			if _kinked(base.value, (plus.value, minus.value), wide, h,
					max(abs(numeric[i]), abs(base.gradient[i]), 1e-8)):
				boundary.append(i)

	analytic = base.gradient
	scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-8)
	errors = np.abs(analytic - numeric) / scale

	return GradientReport(base.value, analytic, numeric, errors, boundary)


def _kinked(center, near, far, h, scale):
	"""
	True unless f sampled at 0, ±h and ±2h looks smooth: equal central
	differences and second differences in the ratio 1:4.
	"""
	slopeNear = (near[0] - near[1]) / (2.0 * h)
	slopeFar = (far[0] - far[1]) / (4.0 * h)
	curveNear = near[0] - 2.0 * center + near[1]
	curveFar = far[0] - 2.0 * center + far[1]
	return (abs(slopeFar - slopeNear) > _SMOOTH_TOLERANCE * scale
			or abs(curveFar - 4.0 * curveNear) / h > _SMOOTH_TOLERANCE * scale)

# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
The dense grasp planner: one candidate per sampled cloud point, optimized by
first-order descent on the task loss, scored, pruned and thinned to a few
diverse grasps, then graded.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
import numpy as np
from densegrasp import constants as C
from densegrasp import io as dgio
from densegrasp import util
from densegrasp.geom import (RigidTransform, Rot6D, axis_angle_matrix,
		farthest_point_sampling, gram_schmidt_rot6d, max_signed_distance,
		rotation_between)
from densegrasp.grasp import GraspConfig, grasp_to_pose
from densegrasp.hand import clamp_joints, close_fingers, place_hand_points, \
		forward_kinematics
from densegrasp.losses import (ContactParams, LossWeights,
		confidence_joint_loss, find_contacts, nearest_mesh, q1_upper,
		reference_q1, task_loss)
from densegrasp.validate import ConfigError, TooFewPoints


log = logging.getLogger(__name__)

OPTIMIZERS = ("gd", "momentum", "adam")


def _classname(obj):
	return "{0.__module__}.{0.__name__}".format(type(obj))


class PlannerParams:
	"""
	Everything the planner can be told: candidate count, descent schedule,
	loss weights, contact model, selection and grading thresholds.
	"""

	__slots__ = [
			'm',
			'iterations',
			'step_size',
			'optimizer',
			'momentum',
			'decay',
			'decay_every',
			'weights',
			'contact',
			'prune_threshold',
			'K',
			'standoff',
			'pretrain_iterations',
			'hard_examples',
			'keep_best',
			'workers',
			'penetration_tolerance',
			'q1_threshold',
			'self_collision',
			'score_scale',
			'back_off',
		]

	def __init__(self, m=C.CANDIDATE_COUNT, iterations=200, step_size=1e-3,
			optimizer="momentum", momentum=0.9, decay=0.9, decay_every=10,
			weights=None, contact=None, prune_threshold=C.PRUNE_THRESHOLD,
			K=C.SELECT_COUNT, standoff=None, pretrain_iterations=0,
			hard_examples=None, keep_best=True, workers=1,
			penetration_tolerance=C.PENETRATION_TOLERANCE, q1_threshold=None,
			self_collision=True, score_scale=None, back_off=True):
		self.m = dgio.number(m, "m", minimum=1, integer=True)
		self.K = dgio.number(K, "K", minimum=1, maximum=self.m, integer=True)
		self.iterations = dgio.number(iterations, "iterations", minimum=0,
				integer=True)
		self.step_size = dgio.number(step_size, "step_size", minimum=0.0)
		if optimizer not in OPTIMIZERS:
			raise ConfigError("expected one of {0}, got {1!r}".format(
					", ".join(OPTIMIZERS), optimizer), field="optimizer")
		self.optimizer = optimizer
		self.momentum = dgio.number(momentum, "momentum", minimum=0.0,
				maximum=1.0)
		self.decay = dgio.number(decay, "decay", minimum=0.0, maximum=1.0)
		self.decay_every = dgio.number(decay_every, "decay_every", minimum=1,
				integer=True)
		self.weights = LossWeights() if weights is None else weights
		self.contact = ContactParams() if contact is None else contact
		self.prune_threshold = dgio.number(prune_threshold,
				"prune_threshold", minimum=0.0, maximum=1.0)
		self.standoff = (None if standoff is None
				else dgio.number(standoff, "standoff", minimum=0.0))
		self.pretrain_iterations = dgio.number(pretrain_iterations,
				"pretrain_iterations", minimum=0, integer=True)
		if hard_examples is True:
			hard_examples = C.HARD_EXAMPLE_COUNT
		elif hard_examples is False:
			hard_examples = None
		self.hard_examples = (None if hard_examples is None
				else dgio.number(hard_examples, "hard_examples", minimum=1,
					integer=True))
		if not isinstance(keep_best, bool):
			raise ConfigError("expected true or false", field="keep_best")
		self.keep_best = keep_best
		self.workers = dgio.number(workers, "workers", minimum=1,
				integer=True)
		self.penetration_tolerance = dgio.number(penetration_tolerance,
				"penetration_tolerance", minimum=0.0)
		self.q1_threshold = (None if q1_threshold is None
				else dgio.number(q1_threshold, "q1_threshold", minimum=0.0))
		if not isinstance(self_collision, bool):
			raise ConfigError("expected true or false", field="self_collision")
		self.self_collision = self_collision
		self.score_scale = (None if score_scale is None
				else dgio.number(score_scale, "score_scale", minimum=0.0))
		if self.score_scale == 0.0:
			raise ConfigError("must be positive", field="score_scale")
		if not isinstance(back_off, bool):
			raise ConfigError("expected true or false", field="back_off")
		self.back_off = back_off

	def __repr__(self):
		return "<{0} m={1} iterations={2} {3}>".format(_classname(self),
				self.m, self.iterations, self.optimizer)

	def __eq__(self, other):
		if not isinstance(other, type(self)): return False
		return self.to_dict() == other.to_dict()

	def replace(self, **changes):
		fields = {name: getattr(self, name) for name in self.__slots__}
		fields.update(changes)
		return PlannerParams(**fields)

	def resolved_q1_threshold(self):
		if self.q1_threshold is not None:
			return self.q1_threshold
		return 0.5 * reference_q1(self.contact)

	def to_dict(self):
		result = {name: getattr(self, name) for name in self.__slots__}
		result["weights"] = self.weights.to_dict()
		result["contact"] = self.contact.to_dict()
		return result

	@classmethod
	def from_dict(cls, document):
		if not isinstance(document, dict):
			raise ConfigError("planner parameters must be a JSON object")
		unknown = set(document) - set(cls.__slots__)
		if unknown:
			raise ConfigError("unknown fields {0}".format(sorted(unknown)))

		fields = dict(document)
		if "weights" in fields:
			fields["weights"] = LossWeights.from_dict(fields["weights"])
		if "contact" in fields:
			fields["contact"] = ContactParams.from_dict(fields["contact"])
		return cls(**fields)


class Candidate:
	"""
	One dense grasp proposal.

	score is exp(-loss / scale) once the candidate has been optimized, None
	before; see rescore for the scale.
	"""

	__slots__ = ['grasp', 'anchor_index', 'score', 'loss', 'trace']

	def __init__(self, grasp, anchor_index, score=None, loss=None, trace=()):
		self.grasp = grasp
		self.anchor_index = int(anchor_index)
		self.score = score
		self.loss = loss
		self.trace = list(trace)

	def __repr__(self):
		return "<{0} anchor={1} score={2!r}>".format(_classname(self),
				self.anchor_index, self.score)

	@property
	def palm_translation(self):
		return self.grasp.anchor + self.grasp.offset

	def to_dict(self):
		return {
			"anchor_index": self.anchor_index,
			"anchor": [float(x) for x in self.grasp.anchor],
			"vector": [float(x) for x in self.grasp.flatten()],
			"score": self.score,
			"loss": self.loss,
			"trace": trace_summary(self.trace),
		}


def trace_summary(trace):
	if not trace:
		return {"steps": 0}
	return {
		"steps": len(trace) - 1,
		"initial": float(trace[0]),
		"final": float(trace[-1]),
		"min": float(min(trace)),
	}


def score_from_loss(loss, scale=1.0):
	"""
	Maps a loss into (0, 1]: exp(-loss / scale), so zero loss scores 1.
	"""
	return max(float(np.exp(-loss / scale)), 1e-300)


def rescore(candidates, params):
	"""
	Scores optimized candidates in units of params.score_scale, or by
	default of the median final loss of the batch, under which half the
	batch scores at least 1/e. Returns the candidates.
	"""
	scale = params.score_scale
	if scale is None:
		losses = [c.loss for c in candidates]
		scale = float(np.median(losses)) if losses else 0.0
		if not scale > 0:
			scale = 1.0

	for c in candidates:
		c.score = score_from_loss(c.loss, scale)
	return candidates


def _yaw(angle):
	return axis_angle_matrix(np.array([0.0, 0.0, 1.0]), angle)


def init_candidates(cloud, hand, params, seed):
	"""
	Places params.m open hands on farthest-point anchors of the cloud, palms
	facing the surface from params.standoff along the normal with a random
	roll.
	"""
	if len(cloud) < params.m:
		raise TooFewPoints("cloud has {0} points, the planner needs "
				"{1}".format(len(cloud), params.m))

	rng = np.random.default_rng(seed)
	standoff = (hand.approach_standoff if params.standoff is None
			else params.standoff)
	anchors = farthest_point_sampling(cloud, params.m,
			int(rng.integers(len(cloud))))
	theta = hand.open_pose()
	zAxis = np.array([0.0, 0.0, 1.0])

	candidates = []
	for index in anchors:
		n = cloud.normals[index]
		rotation = rotation_between(zAxis, -n) @ _yaw(rng.uniform(0.0,
				2.0 * np.pi))
		grasp = GraspConfig(cloud.points[index], standoff * n,
				Rot6D.from_matrix(rotation), theta)
		candidates.append(Candidate(grasp, index))

	return candidates


class Descent:
	"""
	First-order descent on one candidate's grasp vector.

	Angles are clamped into their limits after every step. A step that makes
	the rotation pair degenerate is undone for the rotation part, which
	restarts from the last valid rotation.
	"""

	def __init__(self, candidate, objective, params):
		self.candidate = candidate
		self.objective = objective
		self.params = params
		self.x = candidate.grasp.flatten()
		self.steps = 0
		self.velocity = np.zeros(len(self.x))
		self.second = np.zeros(len(self.x))
		self.current = objective(self.x)
		self.trace = [self.current.value]
		self.best = (self.current.value, self.x.copy())

	def reset(self, objective):
		"""
		Switches to a new objective, restarting the optimizer state.
		"""
		self.objective = objective
		self.velocity[:] = 0.0
		self.second[:] = 0.0
		self.current = objective(self.x)
		self.trace.append(self.current.value)
		self.best = (self.current.value, self.x.copy())

	def _direction(self, gradient):
		p = self.params
		if p.optimizer == "gd":
			return gradient
		if p.optimizer == "momentum":
			self.velocity = p.momentum * self.velocity + gradient
			return self.velocity

		# Adam, with the usual bias correction.
		t = self.steps + 1
		self.velocity = (p.momentum * self.velocity
				+ (1.0 - p.momentum) * gradient)
		self.second = 0.999 * self.second + 0.001 * gradient * gradient
		corrected = self.velocity / (1.0 - p.momentum ** t)
		scale = np.sqrt(self.second / (1.0 - 0.999 ** t)) + 1e-8
		return corrected / scale

	def step(self):
		p = self.params
		rate = p.step_size * p.decay ** (self.steps // p.decay_every)
		x = self.x - rate * self._direction(self.current.gradient)

		grasp = GraspConfig.unflatten(x, self.candidate.grasp.anchor)
		x[9:] = clamp_joints(self.hand, grasp.theta)
		if Rot6D(x[3:6], x[6:9]).is_degenerate():
			log.warning("rotation of candidate at anchor %d degenerated; "
					"restoring its last valid rotation",
					self.candidate.anchor_index)
			last = gram_schmidt_rot6d(Rot6D(self.x[3:6], self.x[6:9]))
			x[3:6] = last[:, 0]
			x[6:9] = last[:, 1]

		self.x = x
		self.steps += 1
		self.current = self.objective(x)
		self.trace.append(self.current.value)
		if self.current.value < self.best[0]:
			self.best = (self.current.value, x.copy())

	@property
	def hand(self):
		return self.objective.hand

	def result(self):
		if self.params.keep_best:
			loss, x = self.best
		else:
			loss, x = self.current.value, self.x
		grasp = GraspConfig.unflatten(x, self.candidate.grasp.anchor)
		return Candidate(grasp, self.candidate.anchor_index,
				score_from_loss(loss), loss, self.trace)


class Objective:
	"""
	The task loss of one candidate as a function of its grasp vector.
	"""

	def __init__(self, anchor, labels, hand, meshes, weights, params,
			guide=None, target=None):
		self.anchor = anchor
		self.labels = labels
		self.hand = hand
		self.meshes = meshes
		self.weights = weights
		self.params = params
		self.guide = guide
		self.target = target

	def __call__(self, x):
		g = GraspConfig.unflatten(x, self.anchor)
		return task_loss(g, self.labels, self.hand, self.meshes, self.weights,
				self.params.contact, self.guide, self.target,
				self.params.self_collision)

	def with_weights(self, weights):
		return Objective(self.anchor, self.labels, self.hand, self.meshes,
				weights, self.params, self.guide, self.target)


def _descent(candidate, labels, hand, meshes, params, guide, target):
	objective = Objective(candidate.grasp.anchor, labels, hand, meshes,
			params.weights, params, guide, target)

	if params.pretrain_iterations and labels:
		chamferOnly = LossWeights(1.0, 0.0, 0.0, 0.0, params.weights.w5)
		descent = Descent(candidate, objective.with_weights(chamferOnly),
				params)
		for _ in range(params.pretrain_iterations):
			descent.step()
		descent.reset(objective)
	else:
		descent = Descent(candidate, objective, params)

	return descent


def optimize_candidate(c, labels_at_anchor, hand, meshes, params, guide=None,
		target=None):
	"""
	Runs params.iterations descent steps on the task loss, after
	params.pretrain_iterations steps on the chamfer term alone when labels
	are given.
	"""
	descent = _descent(c, labels_at_anchor, hand, meshes, params, guide,
			target)
	for _ in range(params.iterations):
		descent.step()
	return descent.result()


def _optimize_job(job):
	return optimize_candidate(*job)


def optimize_candidates(candidates, labelset, hand, meshes, params,
		guide=None, progress=False):
	"""
	Optimizes all candidates, in order, and scores them with rescore.

	With params.hard_examples = n, candidates advance in rounds and only the
	n with the highest current loss take a step each round. Otherwise each
	candidate runs on its own, across params.workers processes.
	"""
	def labels_for(c):
		return labelset.at(c.anchor_index) if labelset is not None else []

	if params.hard_examples is not None:
		descents = [_descent(c, labels_for(c), hand, meshes, params, guide,
				None) for c in candidates]
		rounds = range(params.iterations)
		if progress:
			rounds = util.progress(rounds, params.iterations, "Optimizing")
		for _ in rounds:
			losses = np.array([d.current.value for d in descents])
			hardest = np.argsort(-losses, kind="stable")[:params.hard_examples]
			for i in hardest:
				descents[i].step()
		return rescore([d.result() for d in descents], params)

	jobs = [(c, labels_for(c), hand, meshes, params, guide, None)
			for c in candidates]

	if params.workers > 1:
		with ProcessPoolExecutor(params.workers) as pool:
			results = pool.map(_optimize_job, jobs, chunksize=8)
			if progress:
				results = util.progress(results, len(jobs), "Optimizing")
			return rescore(list(results), params)

	if progress:
		jobs = util.progress(jobs, len(jobs), "Optimizing")
	return rescore([_optimize_job(job) for job in jobs], params)


def score_and_select(cands, params):
	"""
	Drops candidates scoring below the prune threshold, then picks up to K
	by farthest point sampling over palm translations, starting from the
	best-scoring one.
	"""
	kept = [c for c in cands if c.score >= params.prune_threshold]
	if not kept:
		return []

	kept.sort(key=lambda c: -c.score)
	translations = np.array([c.palm_translation for c in kept])
	chosen = farthest_point_sampling(translations,
			min(params.K, len(kept)), 0)
	return [kept[i] for i in chosen]


def _retreat_direction(g, palm):
	length = np.linalg.norm(g.offset)
	if length > 0:
		return g.offset / length
	return -palm.rotation[:, 2]


def approach_trajectory(g, hand, retreat=None, lift=0.1):
	"""
	The four poses of the approach, each a (palm pose, joint angles) pair:
	raised above the pre-grasp pose, the pre-grasp pose backed off along
	the offset, and the grasp pose with open then with the grasp's fingers.
	"""
	palm, theta = grasp_to_pose(g, hand)
	retreat = hand.approach_standoff if retreat is None else retreat
	opened = hand.open_pose()

	back = palm.translation + retreat * _retreat_direction(g, palm)
	pregrasp = RigidTransform(palm.rotation, back, check=False)
	raised = RigidTransform(palm.rotation, back + [0.0, 0.0, lift],
			check=False)

	return [
		(raised, opened),
		(pregrasp, opened),
		(palm, opened),
		(palm, theta),
	]


def _penetration(hand, palm, theta, meshes):
	points, _ = place_hand_points(hand, forward_kinematics(hand, palm, theta))
	return max_signed_distance(meshes, points)


def check_valid(g, hand, meshes, penetration_tol=C.PENETRATION_TOLERANCE,
		retreat=None):
	"""
	True if neither the grasp pose nor the pre-grasp pose pushes any
	collision point deeper than penetration_tol into the meshes.
	"""
	trajectory = approach_trajectory(g, hand, retreat)
	for palm, theta in (trajectory[3], trajectory[1]):
		if _penetration(hand, palm, theta, meshes) > penetration_tol:
			return False
	return True


def back_off(g, hand, meshes, params):
	"""
	The nearest valid grasp on the way back along the approach.

	Step by step the fingers open and the palm backs away along the offset,
	reaching the open pre-grasp pose after BACKOFF_STEPS steps; beyond it
	the open palm keeps backing away, up to BACKOFF_LIMIT pre-grasp
	distances. Returns g when it is valid already and None when no step
	is.
	"""
	tol = params.penetration_tolerance
	if check_valid(g, hand, meshes, tol, params.standoff):
		return g

	retreat = (hand.approach_standoff if params.standoff is None
			else params.standoff)
	palm, _ = grasp_to_pose(g, hand)
	direction = _retreat_direction(g, palm)
	theta = np.asarray(g.theta, dtype=float)
	opened = hand.open_pose()

	for step in range(1, C.BACKOFF_STEPS * C.BACKOFF_LIMIT + 1):
		s = step / C.BACKOFF_STEPS
		moved = GraspConfig(g.anchor, g.offset + s * retreat * direction,
				g.rot, theta + min(s, 1.0) * (opened - theta))
		if check_valid(moved, hand, meshes, tol, params.standoff):
			log.debug("backed off %d of %d steps", step, C.BACKOFF_STEPS)
			return moved

	return None


class Grade:
	"""
	How a grasp fared: validity, contacts after closing, Q1 and success.
	"""

	__slots__ = ['valid', 'contacts', 'q1', 'success']

	def __init__(self, valid, contacts, q1, success):
		self.valid = valid
		self.contacts = contacts
		self.q1 = q1
		self.success = success

	def __repr__(self):
		return "<{0} valid={1} success={2}>".format(_classname(self),
				self.valid, self.success)


def grade_grasp(g, hand, object_mesh, params, meshes=None):
	"""
	Closes the fingers from g, counts contacts with object_mesh and scores
	them by Q1. Success needs 3 contacts, Q1 above the threshold and a valid
	grasp.
	"""
	meshes = [object_mesh] if meshes is None else meshes
	palm, theta = grasp_to_pose(g, hand)
	closed = close_fingers(hand, palm, theta, meshes)
	gripped = GraspConfig(g.anchor, g.offset, g.rot, closed)

	valid = check_valid(g, hand, meshes, params.penetration_tolerance,
			params.standoff)
	contact = params.contact.resolve(object_mesh)
	contacts = find_contacts(gripped, hand, object_mesh, contact)
	q1 = q1_upper(contacts, contact).value if contacts else 0.0

	success = (len(contacts) >= 3
			and q1 > params.resolved_q1_threshold()
			and check_valid(gripped, hand, meshes,
				params.penetration_tolerance, params.standoff))

	return Grade(valid, len(contacts), q1, success)


def proxy_success(g, hand, object_mesh, params, meshes=None):
	"""
	Stand-in for a lift test: see grade_grasp.
	"""
	return grade_grasp(g, hand, object_mesh, params, meshes).success


class PlanResult:
	"""
	Everything planned for one scene.
	"""

	__slots__ = ['candidates', 'selected', 'grades', 'confidence_loss']

	def __init__(self, candidates, selected, grades, confidence_loss):
		self.candidates = candidates
		self.selected = selected
		self.grades = grades
		self.confidence_loss = confidence_loss


def _backed_off(c, hand, meshes, params):
	grasp = back_off(c.grasp, hand, meshes, params)
	if grasp is None or grasp is c.grasp:
		return c
	return Candidate(grasp, c.anchor_index, c.score, c.loss, c.trace)


def plan_scene(cloud, labelset, scene, hand, params, seed, progress=False):
	"""
	init -> optimize -> select -> back off -> grade, on one scene.

	With params.back_off, each selected grasp is first backed off to the
	nearest valid one along its approach.

	labelset may be None to plan without the chamfer term.
	"""
	meshes = scene.meshes()
	objects = scene.object_meshes()

	candidates = init_candidates(cloud, hand, params, seed)
	candidates = optimize_candidates(candidates, labelset, hand, meshes,
			params, guide=objects, progress=progress)
	selected = score_and_select(candidates, params)
	if params.back_off:
		selected = [_backed_off(c, hand, meshes, params) for c in selected]

	grades = []
	for c in selected:
		target = nearest_mesh(objects, c.grasp.anchor)
		grades.append(grade_grasp(c.grasp, hand, target, params, meshes))

	confidence = confidence_joint_loss([c.loss for c in candidates],
			[c.score for c in candidates], params.weights.w5)

	return PlanResult(candidates, selected, grades, confidence)


class EvalReport:
	"""
	Valid, success and overall rates, mean and standard deviation over a
	batch of scenes.

	Per scene: valid = valid / K, success = successes / valid (0 without
	valid grasps), overall = successes / K.
	"""

	__slots__ = [
			'valid_rate',
			'valid_std',
			'success_rate',
			'success_std',
			'overall_rate',
			'overall_std',
			'scenes',
			'outcomes',
		]

	def __init__(self, per_scene, outcomes=()):
		rates = np.array(per_scene, dtype=float).reshape(-1, 3)
		self.scenes = len(rates)
		if self.scenes:
			mean = rates.mean(axis=0)
			std = rates.std(axis=0)
		else:
			mean = std = np.zeros(3)
		self.valid_rate, self.success_rate, self.overall_rate = map(float,
				mean)
		self.valid_std, self.success_std, self.overall_std = map(float, std)
		self.outcomes = list(outcomes)

	def __repr__(self):
		return "<{0} valid={1:.3f} success={2:.3f} overall={3:.3f}>".format(
				_classname(self), self.valid_rate, self.success_rate,
				self.overall_rate)

	@staticmethod
	def scene_rates(valid, successes, K):
		return (valid / K, successes / valid if valid else 0.0,
				successes / K)

	@classmethod
	def from_outcomes(cls, outcomes, scenes, K=C.SELECT_COUNT):
		"""
		outcomes are dicts with "scene", "valid" and "success" keys; scenes
		lists every scene of the batch, planned grasps or not.
		"""
		per_scene = []
		for scene in scenes:
			mine = [o for o in outcomes if o["scene"] == scene]
			valid = sum(1 for o in mine if o["valid"])
			successes = sum(1 for o in mine if o["success"])
			per_scene.append(cls.scene_rates(valid, successes, K))
		return cls(per_scene, outcomes)

	def to_dict(self):
		return {
			"scenes": self.scenes,
			"valid_rate": self.valid_rate,
			"valid_std": self.valid_std,
			"success_rate": self.success_rate,
			"success_std": self.success_std,
			"overall_rate": self.overall_rate,
			"overall_std": self.overall_std,
		}

	def table(self):
		"""
		The rates as a three-column text table.
		"""
		cells = [
			"{0:.2f}±{1:.2f}".format(self.valid_rate, self.valid_std),
			"{0:.2f}±{1:.2f}".format(self.success_rate, self.success_std),
			"{0:.2f}±{1:.2f}".format(self.overall_rate, self.overall_std),
		]
		header = ["Valid rate", "Success", "Overall"]
		widths = [max(len(h), len(c)) for h, c in zip(header, cells)]
		line = lambda row: " | ".join(v.ljust(w) for v, w in zip(row, widths))
		return "\n".join([
				line(header),
				"-+-".join("-" * w for w in widths),
				line(cells),
			])


def evaluate_scene(record, hand, params, seed, progress=False):
	"""
	Plans record's scene and rates its selected grasps.
	"""
	result = plan_scene(record.cloud, record.labelset, record.scene, hand,
			params, seed, progress)

	outcomes = []
	for c, grade in zip(result.selected, result.grades):
		outcomes.append({
			"scene": record.index,
			"valid": grade.valid,
			"success": grade.success,
		})

	return EvalReport.from_outcomes(outcomes, [record.index], params.K)

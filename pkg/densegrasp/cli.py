# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

"""
The densegrasp command line: generate scenes, label them, plan grasps,
evaluate plans and check gradients.

Every command exits with 0 on success, 2 on a configuration error, 3 on
missing or corrupt data, 4 on a hand model mismatch, 5 on a dangling
reference and 6 on a failed verification.
"""
import argparse
import logging
import os
import re
import sys
from time import perf_counter
import numpy as np
from densegrasp import constants as C
from densegrasp import io as dgio
from densegrasp import util
from densegrasp.geom import Rot6D, sample_surface
from densegrasp.grasp import (GraspConfig, GraspLabel, GraspState,
		match_labels, read_labels, read_labelset, write_labelset)
from densegrasp.hand import find_hand
from densegrasp.losses import (ContactParams, LossWeights, chamfer_loss,
		collision_loss, find_contacts, gradient_check, guidance_loss,
		nearest_mesh, q1_loss, q1_upper, task_loss)
from densegrasp.planner import EvalReport, PlannerParams, grade_grasp, \
		plan_scene
from densegrasp.primitives import icosphere
from densegrasp.scenes import (DatasetConfig, generate_dataset, read_scene,
		scene_dir, table_mesh)
from densegrasp.validate import (ConfigError, DanglingReference,
		DimensionMismatch, ParseError)


log = logging.getLogger(__name__)

SCENE_PATTERN = re.compile(r"^scene_(\d{4,})$")

GRADIENT_LOSSES = ("chamfer", "collision", "guidance", "q1", "task")


class CommandFailed(Exception):
	"""
	Stops a command with the given exit code.
	"""

	def __init__(self, code, message):
		super().__init__(message)
		self.code = code


def _exit_code(error):
	if isinstance(error, CommandFailed):
		return error.code
	if isinstance(error, ConfigError):
		return C.EXIT_CONFIG
	if isinstance(error, DimensionMismatch):
		return C.EXIT_MODEL
	if isinstance(error, DanglingReference):
		return C.EXIT_REFERENCE
	return C.EXIT_DATA


def _load_config(path, cls):
	try:
		with open(path, "rt") as in_buf:
			document = dgio.read_json(in_buf, error=ConfigError)
	except OSError as e:
		raise ConfigError("cannot read {0}: {1}".format(path,
				e.strerror)) from None
	return document, cls.from_dict(document)


def _load_hand(name):
	try:
		return find_hand(name)
	except (OSError, ValueError) as e:
		raise CommandFailed(C.EXIT_MODEL, "hand {0!r}: {1}".format(name,
				e)) from None


def _scene_indices(dataset_dir):
	try:
		names = os.listdir(dataset_dir)
	except OSError as e:
		raise CommandFailed(C.EXIT_DATA, "cannot read dataset {0}: "
				"{1}".format(dataset_dir, e.strerror)) from None

	indices = []
	for name in names:
		match = SCENE_PATTERN.match(name)
		if match and os.path.isdir(os.path.join(dataset_dir, name)):
			indices.append(int(match.group(1)))
	if not indices:
		raise CommandFailed(C.EXIT_DATA, "no scenes in {0}".format(
				dataset_dir))
	return sorted(indices)


def _read_cloud(directory):
	with open(os.path.join(directory, C.CLOUD_FILE), "rb") as in_buf:
		return dgio.read_cloud(in_buf)


def _read_labels(path, hand):
	try:
		with open(path, "rt") as in_buf:
			return read_labels(in_buf, hand)
	except ParseError as e:
		if e.field == "theta":
			raise CommandFailed(C.EXIT_MODEL, "{0}: labels do not fit hand "
					"{1!r}: {2}".format(path, hand.name, e)) from None
		raise


def write_manifest(directory, command, checksum, seeds, outputs, started):
	"""
	Records a run in directory's manifest.

	A manifest keeps the latest run of each command that wrote into its
	directory.
	"""
	path = os.path.join(directory, C.MANIFEST_FILE)
	runs = {}
	if os.path.isfile(path):
		try:
			with open(path, "rt") as in_buf:
				runs = dgio.read_json(in_buf).get("runs", {})
		except (ParseError, AttributeError):
			log.warning("replacing unreadable manifest %s", path)

	runs[command] = {
		"config_checksum": checksum,
		"seeds": list(seeds),
		"outputs": sorted(outputs),
		"wall_time": round(perf_counter() - started, 3),
	}

	with open(path, "wt") as out_buf:
		dgio.write_json({"tool": "densegrasp", "version": C.VERSION,
				"runs": runs}, out_buf)


def cmd_gen_scenes(args):
	started = perf_counter()
	document, config = _load_config(args.config, DatasetConfig)
	hand = _load_hand(config.hand)

	seed = args.seed
	if seed is None:
		seed = config.seed if config.seed is not None else 0

	os.makedirs(args.out, exist_ok=True)
	records = generate_dataset(config, args.out, seed, hand,
			progress=args.progress)

	outputs = [os.path.basename(scene_dir(args.out, r.index))
			for r in records]
	write_manifest(args.out, "gen-scenes", dgio.config_checksum(document),
			[seed], outputs, started)
	log.info("generated %d of %d scenes", len(records), config.scene_count)
	return C.EXIT_OK


def cmd_label(args):
	started = perf_counter()
	hand = _load_hand(args.hand)
	indices = _scene_indices(args.dataset)

	shared = None
	if args.labels is not None:
		shared = _read_labels(args.labels, hand)
		if not shared:
			log.warning("label file %s is empty; every point is negative",
					args.labels)

	outputs = []
	for index in indices:
		directory = scene_dir(args.dataset, index)
		cloud, checksum = _read_cloud(directory)
		labels = shared
		if labels is None:
			labels = _read_labels(os.path.join(directory, C.LABELS_FILE),
					hand)
			if not labels:
				log.warning("scene %d has no labels; every point is negative",
						index)

		labelset = match_labels(cloud, labels)
		with open(os.path.join(directory, C.LABELSET_FILE), "wt") as out_buf:
			write_labelset(labelset, checksum, out_buf)
		outputs.append(os.path.join(os.path.basename(directory),
				C.LABELSET_FILE))

	checksum = None
	if args.labels is not None:
		with open(args.labels, "rb") as in_buf:
			checksum = util.checksum_bytes(in_buf.read())
	write_manifest(args.dataset, "label", checksum, [], outputs, started)
	return C.EXIT_OK


def _load_record(dataset_dir, index, hand):
	directory = scene_dir(dataset_dir, index)
	scene = read_scene(os.path.join(directory, C.SCENE_FILE))
	cloud, checksum = _read_cloud(directory)
	labels = _read_labels(os.path.join(directory, C.LABELS_FILE), hand)

	path = os.path.join(directory, C.LABELSET_FILE)
	if not os.path.isfile(path):
		return scene, cloud, match_labels(cloud, labels)

	with open(path, "rt") as in_buf:
		labelset, expected = read_labelset(in_buf, labels)
	if expected != checksum:
		raise DanglingReference("scene {0}: label set was matched to cloud "
				"{1}, the cloud file is {2}".format(index, expected, checksum))
	return scene, cloud, labelset


def cmd_plan(args):
	started = perf_counter()
	hand = _load_hand(args.hand)
	document = {}
	params = PlannerParams()
	if args.params is not None:
		document, params = _load_config(args.params, PlannerParams)
	indices = _scene_indices(args.dataset)
	seeds = util.spawn_seeds(args.seed, len(indices))

	results = []
	candidates = []
	for index, seed in zip(indices, seeds):
		scene, cloud, labelset = _load_record(args.dataset, index, hand)
		log.info("planning scene %d", index)
		plan = plan_scene(cloud, labelset, scene, hand, params, seed,
				progress=args.progress)

		for c in plan.candidates:
			candidates.append(dict(c.to_dict(), scene=index))
		for rank, (c, grade) in enumerate(zip(plan.selected, plan.grades)):
			results.append(dict(c.to_dict(),
					scene=index,
					rank=rank,
					select_count=params.K,
					valid=grade.valid,
					success=grade.success,
					contacts=grade.contacts,
					q1=grade.q1,
					confidence_loss=plan.confidence_loss))

	os.makedirs(args.out, exist_ok=True)
	with open(os.path.join(args.out, C.RESULTS_FILE), "wt") as out_buf:
		dgio.write_jsonl(results, out_buf)
	with open(os.path.join(args.out, C.CANDIDATES_FILE), "wt") as out_buf:
		dgio.write_jsonl(candidates, out_buf)

	write_manifest(args.out, "plan", dgio.config_checksum(document),
			[args.seed], [C.RESULTS_FILE, C.CANDIDATES_FILE], started)
	return C.EXIT_OK


def _regrade(record, dataset_dir, hand, params):
	"""
	Grades a result line that carries no valid/success flags.
	"""
	if hand is None:
		raise ConfigError("result lines without grades need --hand",
				field="hand")
	scene = read_scene(os.path.join(scene_dir(dataset_dir, record["scene"]),
			C.SCENE_FILE))
	anchor = dgio.vector(dgio.require(record, "anchor"), "anchor")
	vector = np.array(dgio.require(record, "vector"), dtype=float)
	if len(vector) != 9 + hand.dof:
		raise DimensionMismatch("result vector has {0} entries, hand {1!r} "
				"needs {2}".format(len(vector), hand.name, 9 + hand.dof))

	g = GraspConfig.unflatten(vector, anchor)
	target = nearest_mesh(scene.object_meshes(), anchor)
	grade = grade_grasp(g, hand, target, params, scene.meshes())
	return grade.valid, grade.success


def cmd_eval(args):
	hand = _load_hand(args.hand) if args.hand is not None else None
	params = PlannerParams()
	if args.params is not None:
		_, params = _load_config(args.params, PlannerParams)
	indices = _scene_indices(args.dataset)
	known = set(indices)

	outcomes = []
	K = params.K
	try:
		in_buf = open(args.results, "rt")
	except OSError as e:
		raise CommandFailed(C.EXIT_DATA, "cannot read {0}: {1}".format(
				args.results, e.strerror)) from None
	with in_buf:
		for lineno, record in dgio.read_jsonl(in_buf):
			scene = dgio.require(record, "scene")
			if scene not in known:
				raise DanglingReference("line {0}: scene {1} is not in "
						"{2}".format(lineno, scene, args.dataset))
			K = record.get("select_count", K)
			if "valid" in record and "success" in record:
				valid, success = record["valid"], record["success"]
			else:
				valid, success = _regrade(record, args.dataset, hand, params)
			outcomes.append({"scene": scene, "valid": bool(valid),
					"success": bool(success)})

	if not outcomes:
		log.warning("%s holds no results; every rate is 0", args.results)

	report = EvalReport.from_outcomes(outcomes, indices, K)
	print(report.table())

	out = args.out if args.out is not None else os.path.dirname(
			os.path.abspath(args.results))
	os.makedirs(out, exist_ok=True)
	with open(os.path.join(out, C.EVAL_FILE), "wt") as out_buf:
		dgio.write_json(report.to_dict(), out_buf)
	return C.EXIT_OK


def _random_label(hand, point, normal, rng):
	palm = GraspConfig(point, normal * rng.uniform(0.0, 0.03),
			Rot6D.from_matrix(_random_rotation(rng)),
			_random_theta(hand, rng))
	state = GraspState(palm, hand)
	return GraspLabel.from_matrix(state.palm_pose.rotation,
			state.palm_pose.translation, state.theta,
			hand.palm_reference_point)


def _random_rotation(rng):
	q, r = np.linalg.qr(rng.normal(size=(3, 3)))
	q = q * np.sign(np.diag(r))
	if np.linalg.det(q) < 0:
		q[:, 2] = -q[:, 2]
	return q


def _random_theta(hand, rng):
	# Clear of the limits, where clamping kills the gradient.
	margin = 0.01 * (hand.upper - hand.lower)
	return rng.uniform(hand.lower + margin, hand.upper - margin)


def gradient_trials(hand, seed, trials, h=1e-5, fault=None):
	"""
	Runs gradient_check on every loss at trials random grasps around a
	sphere resting on a table.

	Returns {loss name: [GradientReport, ...]}. fault names a loss whose
	analytic gradient is corrupted, to exercise the failure path.
	"""
	sphere = icosphere(0.04, center=(0.0, 0.0, 0.04))
	meshes = [table_mesh((0.6, 0.6)), sphere]
	params = ContactParams().resolve(sphere)
	weights = LossWeights(1.0, 1.0, 1.0, 1.0, 1.0)

	def q1(g):
		state = GraspState(g, hand)
		return q1_loss(q1_upper(find_contacts(state, hand, sphere, params),
				params, state))

	reports = {name: [] for name in GRADIENT_LOSSES}
	for trialSeed in util.spawn_seeds(seed, trials):
		rng = np.random.default_rng(trialSeed)
		surface = sample_surface(sphere, 4, int(rng.integers(2 ** 32)))
		labels = [_random_label(hand, p, n, rng)
				for p, n in zip(surface.points[1:], surface.normals[1:])]
		anchor, normal = surface.points[0], surface.normals[0]
		g = GraspConfig(anchor, normal * rng.uniform(-0.02, 0.04),
				Rot6D.from_matrix(_random_rotation(rng)),
				_random_theta(hand, rng))

		losses = {
			"chamfer": lambda g: chamfer_loss(g, labels),
			"collision": lambda g: collision_loss(g, hand, meshes),
			"guidance": lambda g: guidance_loss(g, hand, [sphere]),
			"q1": q1,
			"task": lambda g: task_loss(g, labels, hand, meshes, weights,
					params, [sphere], sphere),
		}
		for name in GRADIENT_LOSSES:
			f = losses[name]
			if name == fault:
				f = _corrupted(f)
			reports[name].append(gradient_check(f, g, h))

	return reports


def _corrupted(f):
	def wrapper(g):
		value = f(g)
		value.gradient = value.gradient * 1.01 + 1e-3
		return value
	return wrapper


def cmd_grad_check(args):
	hand = _load_hand(args.hand)
	reports = gradient_trials(hand, args.seed, args.trials,
			fault=args.inject_fault)

	failures = []
	print("{0:<10} {1:>6} {2:>6} {3:>9} {4:>11}".format("loss", "passed",
			"failed", "boundary", "max error"))
	for name in GRADIENT_LOSSES:
		passed = failed = boundary = 0
		worst = 0.0
		for trial, report in enumerate(reports[name]):
			boundary += report.at_boundary
			worst = max(worst, report.max_error)
			if report.passed(args.tolerance):
				passed += 1
				continue
			failed += 1
			failures.append((name, trial, report.worst(), report.max_error))
		print("{0:<10} {1:>6} {2:>6} {3:>9} {4:>11.3e}".format(name, passed,
				failed, boundary, worst))

	if failures:
		for name, trial, coordinate, error in failures:
			print("FAIL {0} trial {1} coordinate {2}: relative error "
					"{3:.3e}".format(name, trial, coordinate, error))
		raise CommandFailed(C.EXIT_VERIFICATION, "{0} gradient checks "
				"failed".format(len(failures)))
	return C.EXIT_OK


def build_parser():
	common = argparse.ArgumentParser(add_help=False)
	common.add_argument("-v", "--verbose", action="count", default=0,
			help="log more; repeat for debug output")
	common.add_argument("--progress", action="store_true",
			help="report progress on stderr")

	parser = argparse.ArgumentParser(prog="densegrasp",
			description="Dense differentiable grasp synthesis for "
				"multi-fingered hands.")
	commands = parser.add_subparsers(dest="command", metavar="COMMAND")
	commands.required = True

	p = commands.add_parser("gen-scenes", parents=[common],
			help="generate a scene dataset")
	p.add_argument("config", help="dataset configuration JSON file")
	p.add_argument("out", help="directory to write the dataset into")
	p.add_argument("--seed", type=int, default=None,
			help="master seed; overrides the configuration's")
	p.set_defaults(run=cmd_gen_scenes)

	p = commands.add_parser("label", parents=[common],
			help="match grasp labels to clouds")
	p.add_argument("dataset", help="dataset directory")
	p.add_argument("labels", nargs="?", default=None,
			help="JSON-lines label file applied to every scene; default is "
				"each scene's own labels")
	p.add_argument("--hand", default="simple-2f", help="hand name or path")
	p.set_defaults(run=cmd_label)

	p = commands.add_parser("plan", parents=[common],
			help="plan grasps for every scene")
	p.add_argument("dataset", help="dataset directory")
	p.add_argument("--hand", default="simple-2f", help="hand name or path")
	p.add_argument("--params", default=None,
			help="planner parameter JSON file")
	p.add_argument("--out", required=True, help="directory for results")
	p.add_argument("--seed", type=int, default=0, help="master seed")
	p.set_defaults(run=cmd_plan)

	p = commands.add_parser("eval", parents=[common],
			help="rate planned grasps")
	p.add_argument("results", help="results JSON-lines file")
	p.add_argument("dataset", help="dataset directory")
	p.add_argument("--hand", default=None,
			help="hand used to grade lines without grades")
	p.add_argument("--params", default=None,
			help="planner parameter JSON file used for grading")
	p.add_argument("--out", default=None,
			help="directory for eval.json; default beside the results")
	p.set_defaults(run=cmd_eval)

	p = commands.add_parser("grad-check", parents=[common],
			help="check analytic gradients against finite differences")
	p.add_argument("--hand", default="simple-2f", help="hand name or path")
	p.add_argument("--seed", type=int, default=0, help="master seed")
	p.add_argument("--trials", type=int, default=100,
			help="random configurations per loss")
	p.add_argument("--tolerance", type=float, default=1e-4,
			help="largest relative error that passes")
	p.add_argument("--inject-fault", choices=GRADIENT_LOSSES, default=None,
			help=argparse.SUPPRESS)
	p.set_defaults(run=cmd_grad_check)

	return parser


def main(argv=None):
	parser = build_parser()
	args = parser.parse_args(argv)

	level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose,
			2)]
	logging.basicConfig(level=level,
			format="%(levelname)s %(name)s: %(message)s")

	try:
		return args.run(args)
	except (CommandFailed, ValueError, OSError) as e:
		if isinstance(e, OSError) and not isinstance(e, FileNotFoundError):
			message = "{0}: {1}".format(e.filename, e.strerror)
		elif isinstance(e, FileNotFoundError):
			message = "no such file: {0}".format(e.filename)
		else:
			message = str(e)
		sys.stderr.write("error: {0}\n".format(message))
		return _exit_code(e)

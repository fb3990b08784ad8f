#!/usr/bin/python3

# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

import unittest
import numpy as np
from densegrasp import planner, primitives
from densegrasp.geom import (PointCloud, Rot6D, gram_schmidt_rot6d,
		sample_surface)
from densegrasp.grasp import GraspConfig
from densegrasp.hand import HandModel, Link, find_hand
from densegrasp.losses import ContactParams, DiffValue, LossWeights
from densegrasp.planner import Candidate, EvalReport, PlannerParams
from densegrasp.scenes import DatasetRecord, ObjectInstance, Scene, table_mesh
from densegrasp.validate import ConfigError, TooFewPoints


def point_hand(collision):
	palm = Link("palm", primitives.box([0.01, 0.01, 0.01], [0, 0, 20]))
	return HandModel("points", [palm], [], (0, 0, 0),
			collision=([0] * len(collision), collision),
			inner=([0], [(0.0, 0.0, 10.0)]))


def level_grasp(anchor, offset=(0.0, 0.0, 0.0), down=False):
	b = [0, -1, 0] if down else [0, 1, 0]
	return GraspConfig(anchor, offset, Rot6D([1, 0, 0], b), [])


def sphere_scene():
	instance = ObjectInstance("sphere", primitives.make_object("sphere"),
			[0.0, 0.0, 0.04], [0.0, 0.0, 0.0, 1.0])
	return Scene((0.6, 0.6), [instance], 0)


def sphere_cloud(scene, count=64, seed=0):
	return sample_surface(scene.objects[0].world_mesh, count, seed)


def scored(scores, seed=0):
	rng = np.random.default_rng(seed)
	return [Candidate(level_grasp(rng.uniform(-0.1, 0.1, size=3)), i,
			score=s, loss=-np.log(s)) for i, s in enumerate(scores)]


class FixedStep:
	"""
	An objective whose gradient sends gradient descent straight to target.
	"""

	def __init__(self, hand, target):
		self.hand = hand
		self.target = np.asarray(target, dtype=float)

	def __call__(self, x):
		return DiffValue(float(np.sum((x - self.target) ** 2)),
				x - self.target)


class TestParams(unittest.TestCase):

	def testDefaults(self):
		params = PlannerParams()
		self.assertEqual((params.m, params.K, params.iterations), (512, 4, 200))
		self.assertEqual(params.optimizer, "momentum")
		self.assertEqual(params.prune_threshold, 0.15)
		self.assertEqual(params.weights, LossWeights())

	def testInvalid(self):
		self.assertRaises(ConfigError, PlannerParams, m=2, K=4)
		self.assertRaises(ConfigError, PlannerParams, K=0)
		self.assertRaises(ConfigError, PlannerParams, iterations=-1)
		self.assertRaisesRegex(ConfigError, "optimizer", PlannerParams,
				optimizer="lbfgs")
		self.assertRaises(ConfigError, PlannerParams, keep_best="yes")
		self.assertRaisesRegex(ConfigError, "unknown fields",
				PlannerParams.from_dict, {"steps": 3})

	def testDocument(self):
		params = PlannerParams(m=8, K=2, weights=LossWeights(w4=0.5),
				contact=ContactParams(friction_mu=0.4), hard_examples=3)
		self.assertEqual(PlannerParams.from_dict(params.to_dict()), params)
		self.assertEqual(PlannerParams.from_dict({"weights": [1, 0, 0, 0, 1]})
				.weights, LossWeights(1, 0, 0, 0, 1))

	def testHardExampleSwitch(self):
		self.assertIsNone(PlannerParams().hard_examples)
		self.assertEqual(PlannerParams(hard_examples=True).hard_examples, 64)
		self.assertIsNone(PlannerParams(hard_examples=False).hard_examples)
		self.assertEqual(PlannerParams(hard_examples=8).hard_examples, 8)
		self.assertRaises(ConfigError, PlannerParams, hard_examples=0)
		self.assertEqual(PlannerParams.from_dict({"hard_examples": True})
				.hard_examples, 64)

	def testScoreScale(self):
		self.assertIsNone(PlannerParams().score_scale)
		self.assertRaises(ConfigError, PlannerParams, score_scale=0.0)
		self.assertRaises(ConfigError, PlannerParams, back_off="no")

	def testQ1Threshold(self):
		params = PlannerParams()
		self.assertAlmostEqual(params.resolved_q1_threshold(),
				0.5 * planner.reference_q1(params.contact), places=15)
		self.assertEqual(params.replace(q1_threshold=0.2)
				.resolved_q1_threshold(), 0.2)


class TestInit(unittest.TestCase):

	def setUp(self):
		self.hand = find_hand("simple-2f")
		self.cloud = sample_surface(primitives.icosphere(0.04), 200, 3)
		self.params = PlannerParams(m=20, K=4)

	def testFacingSurface(self):
		"""
		Each palm faces its anchor's normal, stood off along it.
		"""
		candidates = planner.init_candidates(self.cloud, self.hand,
				self.params, 7)
		self.assertEqual(len(candidates), 20)
		self.assertEqual(len({c.anchor_index for c in candidates}), 20)

		for c in candidates:
			n = self.cloud.normals[c.anchor_index]
			np.testing.assert_array_equal(c.grasp.anchor,
					self.cloud.points[c.anchor_index])
			R = gram_schmidt_rot6d(c.grasp.rot)
			np.testing.assert_allclose(R[:, 2], -n, atol=1e-9)
			np.testing.assert_allclose(c.grasp.offset,
					self.hand.approach_standoff * n, atol=1e-15)
			np.testing.assert_array_equal(c.grasp.theta,
					self.hand.open_pose())
			self.assertIsNone(c.score)

	def testStandoff(self):
		candidates = planner.init_candidates(self.cloud, self.hand,
				self.params.replace(standoff=0.01), 7)
		for c in candidates:
			self.assertAlmostEqual(np.linalg.norm(c.grasp.offset), 0.01,
					places=12)

	def testDeterministic(self):
		a = planner.init_candidates(self.cloud, self.hand, self.params, 8)
		b = planner.init_candidates(self.cloud, self.hand, self.params, 8)
		self.assertEqual([c.grasp for c in a], [c.grasp for c in b])

	def testTooFewPoints(self):
		self.assertRaises(TooFewPoints, planner.init_candidates,
				PointCloud(self.cloud.points[:10], self.cloud.normals[:10]),
				self.hand, self.params, 0)


class TestOptimize(unittest.TestCase):

	def testNoSteps(self):
		"""
		Zero iterations leave the grasp alone and score the initial loss.
		"""
		hand = find_hand("simple-2f")
		scene = sphere_scene()
		params = PlannerParams(m=1, K=1, iterations=0)
		c = planner.init_candidates(sphere_cloud(scene), hand, params, 1)[0]

		result = planner.optimize_candidate(c, [], hand, scene.meshes(),
				params)
		self.assertEqual(result.grasp, c.grasp)
		self.assertEqual(len(result.trace), 1)
		self.assertEqual(result.loss, result.trace[0])
		self.assertEqual(result.score, planner.score_from_loss(result.loss))

	def testPushedOut(self):
		"""
		A single point stuck in a box is pushed out monotonically.
		"""
		hand = point_hand([(0.0, 0.0, 0.0)])
		box = primitives.box([1.0, 1.0, 1.0])
		params = PlannerParams(m=1, K=1, iterations=20, step_size=0.2,
				optimizer="gd", weights=LossWeights(0, 1, 0, 0),
				self_collision=False)
		c = Candidate(level_grasp([0.0, 0.0, 0.4]), 0)

		result = planner.optimize_candidate(c, [], hand, [box], params)
		trace = np.array(result.trace)
		self.assertEqual(len(trace), 21)
		self.assertAlmostEqual(trace[0], 0.01, places=12)
		self.assertTrue(np.all(np.diff(trace) <= 0))
		self.assertLess(trace[-1], trace[0])
		self.assertGreater(result.grasp.offset[2], 0.0)

	def testDescends(self):
		"""
		Without keeping the best iterate, nearly every candidate still ends
		below its starting loss.
		"""
		hand = find_hand("simple-2f")
		scene = sphere_scene()
		params = PlannerParams(m=16, K=2, iterations=30, keep_best=False)
		candidates = planner.init_candidates(sphere_cloud(scene), hand,
				params, 2)
		results = planner.optimize_candidates(candidates, None, hand,
				scene.meshes(), params, guide=scene.object_meshes())
		self.assertEqual([r.anchor_index for r in results],
				[c.anchor_index for c in candidates])

		lower = 0
		for r in results:
			self.assertEqual(len(r.trace), 31)
			self.assertEqual(r.loss, r.trace[-1])
			self.assertTrue(0.0 < r.score <= 1.0)
			lower += r.trace[-1] <= r.trace[0]
		self.assertGreaterEqual(lower, 0.9 * len(results))

	def testKeepBest(self):
		hand = find_hand("simple-2f")
		scene = sphere_scene()
		params = PlannerParams(m=4, K=2, iterations=3, step_size=0.01)
		candidates = planner.init_candidates(sphere_cloud(scene), hand,
				params, 2)
		results = planner.optimize_candidates(candidates, None, hand,
				scene.meshes(), params, guide=scene.object_meshes())
		for r in results:
			self.assertEqual(r.loss, min(r.trace))

	def testHardExamples(self):
		"""
		Each round only the hardest candidates take a step.
		"""
		hand = point_hand([(0.0, 0.0, 0.0)])
		box = primitives.box([1.0, 1.0, 1.0])
		params = PlannerParams(m=3, K=1, iterations=4, step_size=0.1,
				optimizer="gd", weights=LossWeights(0, 1, 0, 0),
				self_collision=False, hard_examples=1)
		candidates = [Candidate(level_grasp([0.0, 0.0, z]), i)
				for i, z in enumerate((0.45, 0.2, 0.6))]

		results = planner.optimize_candidates(candidates, None, hand, [box],
				params)
		steps = [len(r.trace) - 1 for r in results]
		self.assertEqual(sum(steps), 4)
		# The deepest point is furthest from done.
		self.assertEqual(steps, [0, 4, 0])

	def testWorkers(self):
		hand = point_hand([(0.0, 0.0, 0.0)])
		box = primitives.box([1.0, 1.0, 1.0])
		params = PlannerParams(m=2, K=1, iterations=3, step_size=0.1,
				weights=LossWeights(0, 1, 0, 0), self_collision=False)
		candidates = [Candidate(level_grasp([0.0, 0.0, z]), i)
				for i, z in enumerate((0.45, 0.2))]

		alone = planner.optimize_candidates(candidates, None, hand, [box],
				params)
		pooled = planner.optimize_candidates(candidates, None, hand, [box],
				params.replace(workers=2))
		self.assertEqual([r.grasp for r in alone], [r.grasp for r in pooled])

	def testDegenerateRotation(self):
		"""
		A step that collapses the rotation pair restarts from the last valid
		rotation.
		"""
		hand = point_hand([(0.0, 0.0, 0.0)])
		c = Candidate(GraspConfig(np.zeros(3), np.zeros(3),
				Rot6D([1.0, 0.2, 0.0], [0.0, 1.0, 0.3]), []), 0)
		target = np.array([0.1, 0.0, 0.0, 1, 1, 1, 2, 2, 2], dtype=float)
		params = PlannerParams(m=1, K=1, iterations=1, step_size=1.0,
				optimizer="gd", keep_best=False)

		descent = planner.Descent(c, FixedStep(hand, target), params)
		with self.assertLogs("densegrasp.planner", "WARNING"):
			descent.step()
		result = descent.result()

		self.assertFalse(result.grasp.is_degenerate())
		R = gram_schmidt_rot6d(c.grasp.rot)
		np.testing.assert_array_equal(result.grasp.rot.a, R[:, 0])
		np.testing.assert_array_equal(result.grasp.rot.b, R[:, 1])
		np.testing.assert_array_equal(result.grasp.offset, [0.1, 0.0, 0.0])


class TestSelect(unittest.TestCase):

	def testAllPruned(self):
		params = PlannerParams(m=8, K=4)
		self.assertEqual(planner.score_and_select(scored([0.1, 0.149, 0.01]),
				params), [])

	def testBestFirst(self):
		rng = np.random.default_rng(51)
		candidates = scored(rng.uniform(0.2, 1.0, size=10))
		selected = planner.score_and_select(candidates,
				PlannerParams(m=10, K=4))
		self.assertEqual(len(selected), 4)
		self.assertEqual(selected[0].score, max(c.score for c in candidates))
		self.assertEqual(len({id(c) for c in selected}), 4)

	def testOracle(self):
		"""
		Selection is greedy farthest point order over the survivors.
		"""
		rng = np.random.default_rng(52)
		scores = rng.uniform(0.0, 1.0, size=30)
		candidates = scored(scores, 52)
		params = PlannerParams(m=30, K=5)

		kept = sorted([c for c in candidates if c.score >= 0.15],
				key=lambda c: -c.score)
		points = np.array([c.palm_translation for c in kept])
		chosen = [0]
		while len(chosen) < 5:
			distances = [min(np.linalg.norm(p - points[i]) for i in chosen)
					if j not in chosen else -1.0
					for j, p in enumerate(points)]
			chosen.append(int(np.argmax(distances)))

		selected = planner.score_and_select(candidates, params)
		self.assertEqual([c.anchor_index for c in selected],
				[kept[i].anchor_index for i in chosen])

	def testFewSurvivors(self):
		selected = planner.score_and_select(scored([0.9, 0.05, 0.5]),
				PlannerParams(m=8, K=4))
		self.assertEqual([c.anchor_index for c in selected], [0, 2])


class TestScores(unittest.TestCase):

	def losses(self, values):
		return [Candidate(level_grasp([0.0, 0.0, 0.0]), i, loss=v)
				for i, v in enumerate(values)]

	def testMedianScale(self):
		"""
		By default the median loss scores 1/e and the tail is pruned.
		"""
		params = PlannerParams(m=5, K=4)
		candidates = planner.rescore(self.losses([1.0, 2.0, 3.0, 4.0, 9.0]),
				params)
		np.testing.assert_allclose([c.score for c in candidates],
				np.exp(-np.array([1.0, 2.0, 3.0, 4.0, 9.0]) / 3.0),
				rtol=1e-15)

		selected = planner.score_and_select(candidates, params)
		self.assertEqual(sorted(c.anchor_index for c in selected),
				[0, 1, 2, 3])

	def testFixedScale(self):
		params = PlannerParams(m=2, K=1, score_scale=0.5)
		candidates = planner.rescore(self.losses([0.5, 1.0]), params)
		self.assertAlmostEqual(candidates[0].score, np.exp(-1.0), places=15)
		self.assertAlmostEqual(candidates[1].score, np.exp(-2.0), places=15)

	def testZeroLosses(self):
		candidates = planner.rescore(self.losses([0.0, 0.0, 0.0]),
				PlannerParams(m=3, K=1))
		self.assertEqual([c.score for c in candidates], [1.0, 1.0, 1.0])

	def testOptimizedBatchSpreads(self):
		"""
		Optimized scores spread out: at least half reach 1/e and not all
		candidates score the same.
		"""
		hand = find_hand("simple-2f")
		scene = sphere_scene()
		params = PlannerParams(m=16, K=4, iterations=10)
		candidates = planner.init_candidates(sphere_cloud(scene), hand,
				params, 6)
		results = planner.optimize_candidates(candidates, None, hand,
				scene.meshes(), params, guide=scene.object_meshes())

		scores = np.array([r.score for r in results])
		self.assertGreaterEqual(np.count_nonzero(scores >= np.exp(-1.0)), 8)
		self.assertLess(scores.min(), scores.max())


class TestBackOff(unittest.TestCase):

	def setUp(self):
		self.hand = point_hand([(0.0, 0.0, 0.0)])
		self.table = table_mesh((1.0, 1.0))
		self.params = PlannerParams(m=1, K=1, standoff=0.04)

	def testValidUntouched(self):
		g = level_grasp([0.0, 0.0, 0.5], down=True)
		self.assertIs(planner.back_off(g, self.hand, [self.table],
				self.params), g)

	def testNearestValidStep(self):
		"""
		A palm ten millimeters into the table comes back two steps of five
		millimeters, to the surface.
		"""
		g = level_grasp([0.0, 0.0, -0.01], down=True)
		self.assertFalse(planner.check_valid(g, self.hand, [self.table]))

		moved = planner.back_off(g, self.hand, [self.table], self.params)
		np.testing.assert_allclose(moved.offset, [0.0, 0.0, 0.01],
				atol=1e-15)
		np.testing.assert_array_equal(moved.anchor, g.anchor)
		self.assertTrue(planner.check_valid(moved, self.hand, [self.table],
				retreat=0.04))

	def testOpensFingers(self):
		hand = find_hand("simple-2f")
		closed = hand.upper.copy()
		g = GraspConfig([0.0, 0.0, 0.5], [0.0, 0.0, 0.0],
				Rot6D([1, 0, 0], [0, -1, 0]), closed)
		wall = primitives.box([1.0, 1.0, 0.2], [0.0, 0.0, 0.45])
		params = PlannerParams(m=1, K=1, standoff=0.2)

		moved = planner.back_off(g, hand, [wall], params)
		self.assertIsNotNone(moved)
		self.assertTrue(planner.check_valid(moved, hand, [wall], retreat=0.2))
		# Backing off opens the fingers before anything else.
		self.assertTrue(np.all(np.abs(moved.theta - hand.open_pose())
				<= np.abs(closed - hand.open_pose())))

	def testHopeless(self):
		block = primitives.box([2.0, 2.0, 2.0])
		g = level_grasp([0.0, 0.0, 0.0], down=True)
		self.assertIsNone(planner.back_off(g, self.hand, [block],
				self.params))


class TestValidity(unittest.TestCase):

	def setUp(self):
		self.hand = point_hand([(0.0, 0.0, 0.0)])
		self.table = table_mesh((1.0, 1.0))

	def testTrajectory(self):
		hand = find_hand("simple-2f")
		g = GraspConfig([0.0, 0.0, 0.0], [0.0, 0.0, 0.02],
				Rot6D([1, 0, 0], [0, -1, 0]), [0.5, 0.5, 0.5, 0.5])
		poses = planner.approach_trajectory(g, hand)
		self.assertEqual(len(poses), 4)

		(raised, a), (pregrasp, b), (palm, c), (closing, d) = poses
		np.testing.assert_allclose(pregrasp.translation,
				[0.0, 0.0, 0.02 + hand.approach_standoff], atol=1e-15)
		np.testing.assert_allclose(raised.translation,
				pregrasp.translation + [0.0, 0.0, 0.1], atol=1e-15)
		np.testing.assert_array_equal(palm.translation, [0.0, 0.0, 0.02])
		self.assertEqual(palm, closing)
		for theta in (a, b, c):
			np.testing.assert_array_equal(theta, hand.open_pose())
		np.testing.assert_array_equal(d, [0.5, 0.5, 0.5, 0.5])

	def testFarAway(self):
		g = level_grasp([0.0, 0.0, 1.0])
		self.assertTrue(planner.check_valid(g, self.hand, [self.table]))

	def testEmbedded(self):
		"""
		A palm ten millimeters into the table is not valid.
		"""
		g = level_grasp([0.0, 0.0, -0.01], down=True)
		self.assertFalse(planner.check_valid(g, self.hand, [self.table]))

	def testBoundary(self):
		"""
		Penetration exactly at the tolerance is still valid.
		"""
		g = level_grasp([0.0, 0.0, -0.002], down=True)
		self.assertTrue(planner.check_valid(g, self.hand, [self.table],
				0.002))
		self.assertFalse(planner.check_valid(g, self.hand, [self.table],
				0.0019))
		self.assertTrue(planner.check_valid(g, self.hand, [self.table],
				0.003))

	def testPregrasp(self):
		"""
		A grasp is not valid when backing off runs into something.
		"""
		ceiling = primitives.box([1.0, 1.0, 0.02], [0.0, 0.0, 0.1])
		g = level_grasp([0.0, 0.0, 0.05], [0.0, 0.0, 0.01])
		self.assertTrue(planner.check_valid(g, self.hand, [self.table],
				retreat=0.04))
		self.assertFalse(planner.check_valid(g, self.hand,
				[self.table, ceiling], retreat=0.04))


def around(center, radius):
	return [tuple(np.asarray(center) + radius * np.asarray(axis))
			for axis in ([1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0],
				[0, 0, 1], [0, 0, -1])]


class TestGrading(unittest.TestCase):

	def setUp(self):
		self.center = np.array([0.3, -0.2, 0.1])
		self.sphere = primitives.icosphere(0.04, center=self.center)
		self.params = PlannerParams(m=4, K=1, standoff=0.1)

	def grasp(self):
		return GraspConfig(self.center - [0.0, 0.0, 0.001],
				[0.0, 0.0, 0.001], Rot6D([1, 0, 0], [0, 1, 0]), [])

	def testNowhereNear(self):
		hand = point_hand(around((5.0, 5.0, 5.0), 0.04))
		grade = planner.grade_grasp(self.grasp(), hand, self.sphere,
				self.params)
		self.assertEqual(grade.contacts, 0)
		self.assertEqual(grade.q1, 0.0)
		self.assertFalse(grade.success)
		self.assertTrue(grade.valid)

	def testSingleContact(self):
		hand = point_hand([(0.0, 0.0, 0.0405), (5.0, 5.0, 5.0)])
		grade = planner.grade_grasp(self.grasp(), hand, self.sphere,
				self.params)
		self.assertEqual(grade.contacts, 1)
		self.assertTrue(grade.valid)
		self.assertFalse(planner.proxy_success(self.grasp(), hand,
				self.sphere, self.params))

	def testEnveloping(self):
		"""
		Six contacts around a small sphere hold it.
		"""
		hand = point_hand(around((0.0, 0.0, 0.0), 0.0405))
		grade = planner.grade_grasp(self.grasp(), hand, self.sphere,
				self.params)
		self.assertEqual(grade.contacts, 6)
		self.assertTrue(grade.valid)
		self.assertGreater(grade.q1, self.params.resolved_q1_threshold())
		self.assertTrue(grade.success)


class TestReport(unittest.TestCase):

	def testSceneRates(self):
		self.assertEqual(EvalReport.scene_rates(3, 2, 4), (0.75, 2 / 3, 0.5))
		self.assertEqual(EvalReport.scene_rates(0, 0, 4), (0.0, 0.0, 0.0))
		self.assertEqual(EvalReport.scene_rates(4, 4, 4), (1.0, 1.0, 1.0))

	def testFromOutcomes(self):
		outcomes = ([{"scene": 0, "valid": True, "success": True}] * 4
				+ [{"scene": 1, "valid": False, "success": False}] * 4)
		report = EvalReport.from_outcomes(outcomes, [0, 1, 2], 4)
		self.assertEqual(report.scenes, 3)
		self.assertAlmostEqual(report.valid_rate, 1 / 3, places=15)
		self.assertAlmostEqual(report.overall_rate, 1 / 3, places=15)
		self.assertAlmostEqual(report.valid_std, np.std([1.0, 0.0, 0.0]),
				places=15)
		self.assertEqual(len(report.outcomes), 8)

	def testTable(self):
		report = EvalReport([(1.0, 1.0, 1.0), (0.0, 0.0, 0.0)])
		lines = report.table().splitlines()
		self.assertEqual(len(lines), 3)
		self.assertEqual([h.strip() for h in lines[0].split("|")],
				["Valid rate", "Success", "Overall"])
		self.assertEqual([c.strip() for c in lines[2].split("|")],
				["0.50±0.50"] * 3)
		self.assertEqual(report.to_dict()["overall_std"], 0.5)

	def testEmpty(self):
		report = EvalReport([])
		self.assertEqual(report.scenes, 0)
		self.assertEqual(report.overall_rate, 0.0)


class TestPlanScene(unittest.TestCase):

	def setUp(self):
		self.hand = find_hand("simple-2f")
		self.scene = sphere_scene()
		self.cloud = sphere_cloud(self.scene, 32, 4)
		self.params = PlannerParams(m=4, K=2, iterations=2, step_size=0.005,
				prune_threshold=0.0)

	def testPlan(self):
		result = planner.plan_scene(self.cloud, None, self.scene, self.hand,
				self.params, 3)
		self.assertEqual(len(result.candidates), 4)
		self.assertEqual(len(result.selected), 2)
		self.assertEqual(len(result.grades), 2)
		self.assertTrue(np.isfinite(result.confidence_loss))
		anchors = [c.anchor_index for c in result.candidates]
		for c in result.selected:
			self.assertIn(c.anchor_index, anchors)
			np.testing.assert_array_equal(c.grasp.anchor,
					self.cloud.points[c.anchor_index])

	def testDeterministic(self):
		a = planner.plan_scene(self.cloud, None, self.scene, self.hand,
				self.params, 5)
		b = planner.plan_scene(self.cloud, None, self.scene, self.hand,
				self.params, 5)
		self.assertEqual([c.grasp for c in a.selected],
				[c.grasp for c in b.selected])

	def testEvaluate(self):
		record = DatasetRecord(7, self.scene, self.cloud, [], None)
		report = planner.evaluate_scene(record, self.hand, self.params, 3)
		self.assertEqual(report.scenes, 1)
		self.assertEqual(len(report.outcomes), 2)
		self.assertTrue(all(o["scene"] == 7 for o in report.outcomes))
		self.assertLessEqual(report.overall_rate, report.valid_rate)
		self.assertAlmostEqual(report.overall_rate,
				report.valid_rate * report.success_rate, places=12)

	def testSelectedGraspValid(self):
		"""
		After descent on the sphere, at least one selected grasp keeps
		within the penetration tolerance at its grasp and pre-grasp poses.
		"""
		params = PlannerParams(m=16, K=4, iterations=30)
		cloud = sphere_cloud(self.scene, 64, 4)
		result = planner.plan_scene(cloud, None, self.scene, self.hand,
				params, 3)
		self.assertGreater(len(result.selected), 0)

		meshes = self.scene.meshes()
		valid = [planner.check_valid(c.grasp, self.hand, meshes,
				params.penetration_tolerance, params.standoff)
				for c in result.selected]
		self.assertTrue(any(valid))
		self.assertEqual(valid, [g.valid for g in result.grades])

	def testDenseShape(self):
		"""
		512 candidates on a 2048 point cloud, at distinct points, and at
		most four selected.
		"""
		params = PlannerParams(iterations=0)
		cloud = sphere_cloud(self.scene, 2048, 9)
		result = planner.plan_scene(cloud, None, self.scene, self.hand,
				params, 1)
		self.assertEqual(len(result.candidates), 512)
		self.assertEqual(len({c.anchor_index for c in result.candidates}),
				512)
		self.assertLessEqual(len(result.selected), 4)
		for c in result.selected:
			self.assertGreaterEqual(c.score, 0.15)


if __name__ == "__main__":
	unittest.main()

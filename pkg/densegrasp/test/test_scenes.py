#!/usr/bin/python3

# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

import unittest
import json
import os
import tempfile
import numpy as np
from densegrasp import constants as C
from densegrasp import losses, primitives, scenes
from densegrasp.geom import Rot6D
from densegrasp.grasp import GraspConfig
from densegrasp.hand import find_hand
from densegrasp.scenes import (CameraSpec, DatasetConfig, ObjectInstance,
		Scene)
from densegrasp.validate import ConfigError, EmptyView, ValidationError


def small_rig(extent, width=32, height=24):
	return [CameraSpec(c.position, c.look_at, width=width, height=height)
			for c in scenes.default_cameras(extent)]


def one_object_scene(mesh_id, translation):
	instance = ObjectInstance(mesh_id, primitives.make_object(mesh_id),
			translation, [0.0, 0.0, 0.0, 1.0])
	return Scene((0.6, 0.6), [instance], 0)


def brute_force_ray(origin, direction, mesh):
	"""
	Nearest hit by solving origin + t d = a + u (b - a) + v (c - a) face by
	face.
	"""
	best = np.inf
	for a, b, c in mesh.vertices[mesh.faces]:
		system = np.column_stack([-direction, b - a, c - a])
		if abs(np.linalg.det(system)) < 1e-15:
			continue
		t, u, v = np.linalg.solve(system, origin - a)
		if t > 1e-12 and u >= 0 and v >= 0 and u + v <= 1:
			best = min(best, t)
	return best


class TestStablePose(unittest.TestCase):

	def testTable(self):
		table = scenes.table_mesh((0.6, 0.4))
		self.assertAlmostEqual(table.upper[2], 0.0, places=15)
		np.testing.assert_allclose(table.upper[:2], [0.3, 0.2], atol=1e-15)

	def testBoxFaces(self):
		"""
		Every face of a box is a stable face, two triangles each.
		"""
		faces = scenes.stable_faces(primitives.box([0.1, 0.06, 0.04]))
		self.assertEqual(len(faces), 6)
		self.assertAlmostEqual(faces[0].area, 0.1 * 0.06, places=12)

	def testBoxRests(self):
		box = primitives.box([0.1, 0.06, 0.04], [0.3, -0.2, 0.5])
		for seed in range(10):
			resting = box.transformed(scenes.stable_pose(box, seed))
			self.assertAlmostEqual(resting.lower[2], 0.0, delta=1e-9)
			# Resting on a face, four corners touch the plane.
			low = np.abs(resting.vertices[:, 2]) < 1e-9
			self.assertEqual(int(np.count_nonzero(low)), 4)

	def testSphereRests(self):
		sphere = primitives.icosphere(0.04)
		resting = sphere.transformed(scenes.stable_pose(sphere, 3))
		self.assertAlmostEqual(resting.lower[2], 0.0, delta=1e-12)
		np.testing.assert_allclose(resting.center_mass[:2], [0.0, 0.0],
				atol=1e-12)

	def testDeterministic(self):
		mesh = primitives.make_object("l-block")
		self.assertEqual(scenes.stable_pose(mesh, 11),
				scenes.stable_pose(mesh, 11))

	def testStandard(self):
		"""
		The standard pose rests on the largest face with no yaw.
		"""
		box = primitives.box([0.1, 0.06, 0.04])
		resting = box.transformed(scenes.stable_pose(box, 5, standard=True))
		extents = resting.upper - resting.lower
		np.testing.assert_allclose(sorted(extents[:2]), [0.06, 0.1],
				atol=1e-12)
		self.assertAlmostEqual(extents[2], 0.04, delta=1e-12)


class TestPlacement(unittest.TestCase):

	def testSingleBox(self):
		library = [("box-small", primitives.make_object("box-small"))]
		scene = scenes.place_objects(library, 1, (1.0, 1.0), 4)
		self.assertEqual(len(scene.objects), 1)
		self.assertEqual(scene.skipped, [])
		self.assertAlmostEqual(scene.objects[0].world_mesh.lower[2], 0.0,
				delta=1e-9)

	def testCrowded(self):
		"""
		Objects that do not fit are skipped, never overlapped.
		"""
		library = [("big", primitives.box([0.6, 0.6, 0.6]))]
		scene = scenes.place_objects(library, 3, (1.0, 1.0), 8)
		self.assertLessEqual(len(scene.objects), 2)
		self.assertEqual(len(scene.objects) + len(scene.skipped), 3)

		meshes = scene.object_meshes()
		for i, mesh in enumerate(meshes):
			samples = scenes.sample_surface(mesh, C.OVERLAP_SAMPLES, i).points
			for j, other in enumerate(meshes):
				if i != j:
					self.assertLess(other.signed_distances(samples).max(),
							C.SCENE_TOLERANCE)

	def testDeterministic(self):
		library = [(mesh_id, primitives.make_object(mesh_id))
				for mesh_id in primitives.object_ids()]
		self.assertEqual(scenes.place_objects(library, 4, (0.6, 0.6), 21),
				scenes.place_objects(library, 4, (0.6, 0.6), 21))

	def testSceneFile(self):
		library = [(mesh_id, primitives.make_object(mesh_id))
				for mesh_id in primitives.object_ids()]
		scene = scenes.place_objects(library, 3, (0.6, 0.6), 22)
		text = json.dumps(scene.to_dict())
		self.assertEqual(Scene.from_dict(json.loads(text)), scene)


class TestCameras(unittest.TestCase):

	def testInvalid(self):
		self.assertRaises(ValidationError, CameraSpec, [0, 0, 1], [0, 0, 1])
		self.assertRaises(ValidationError, CameraSpec, [0, 0, 1], [0, 0, 0],
				up=[0, 0, 1])
		self.assertRaises(ValidationError, CameraSpec, [1, 0, 1], [0, 0, 0],
				fov=np.pi)
		self.assertRaises(ValidationError, CameraSpec, [1, 0, 1], [0, 0, 0],
				width=0)

	def testRays(self):
		camera = CameraSpec([0, 0, 2], [0, 0, 0], up=[0, 1, 0], width=3,
				height=3)
		origins, directions = camera.rays()
		self.assertEqual(directions.shape, (9, 3))
		np.testing.assert_array_equal(directions[4], [0, 0, -1])
		np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0,
				atol=1e-15)
		# The top-left pixel looks up and to the left.
		self.assertLess(directions[0, 0], 0.0)
		self.assertGreater(directions[0, 1], 0.0)

	def testDefaultRig(self):
		rig = scenes.default_cameras((0.6, 0.4))
		self.assertEqual(len(rig), 4)
		np.testing.assert_array_equal(rig[0].position, [0.3, 0.0, 0.3])
		np.testing.assert_array_equal(rig[3].position, [0.0, -0.2, 0.2])


class TestRender(unittest.TestCase):

	def testFacingSquare(self):
		"""
		A face two meters in front of the camera.
		"""
		wall = primitives.box([1.0, 1.0, 1.0], [0.1, 0.05, -0.5])
		camera = CameraSpec([0, 0, 2], [0, 0, 0], up=[0, 1, 0], width=5,
				height=5)
		origins, directions = camera.rays()
		distance, owner, normal = scenes.raycast([wall], origins, directions)
		self.assertAlmostEqual(distance[12], 2.0, delta=1e-9)
		self.assertEqual(owner[12], 0)
		np.testing.assert_allclose(normal[12], [0, 0, 1], atol=1e-15)

	def testEmptyScene(self):
		camera = CameraSpec([0, 0, 2], [0, 0, 0], up=[0, 1, 0], width=4,
				height=3)
		image = scenes.render_depth(None, camera)
		self.assertEqual(image.depth.shape, (3, 4))
		self.assertTrue(np.all(np.isinf(image.depth)))
		self.assertTrue(np.all(image.hit == -1))

	def testHitIds(self):
		"""
		The table reads as 0 and the first object as 1.
		"""
		scene = one_object_scene("box-small", [0.01, -0.005, 0.025])
		camera = CameraSpec([0, 0, 0.5], [0, 0, 0], up=[0, 1, 0], width=5,
				height=5)
		image = scenes.render_depth(scene, camera)
		self.assertEqual(image.hit[2, 2], 1)
		self.assertAlmostEqual(image.depth[2, 2], 0.45, delta=1e-12)
		self.assertEqual(image.hit[0, 0], 0)
		np.testing.assert_allclose(image.points[2, 2], [0.0, 0.0, 0.05],
				atol=1e-12)

	def testBruteForce(self):
		rng = np.random.default_rng(31)
		sphere = primitives.icosphere(0.3, 1)
		origins = rng.normal(size=(60, 3))
		origins *= (2.0 / np.linalg.norm(origins, axis=1))[:, None]
		directions = -origins + rng.normal(scale=0.2, size=(60, 3))
		directions /= np.linalg.norm(directions, axis=1)[:, None]

		distance, owner, _ = scenes.raycast([sphere], origins, directions)
		self.assertTrue(np.any(owner == 0))
		for i in range(len(origins)):
			expected = brute_force_ray(origins[i], directions[i], sphere)
			if np.isinf(expected):
				self.assertTrue(np.isinf(distance[i]))
			else:
				self.assertAlmostEqual(distance[i], expected, delta=1e-9)


class TestFusion(unittest.TestCase):

	def setUp(self):
		self.scene = one_object_scene("box-long", [0.0, 0.0, 0.02])
		self.rig = small_rig((0.6, 0.6), 48, 36)

	def testOnSurface(self):
		cloud = scenes.fuse_point_cloud(self.scene, self.rig, 5, size=256)
		self.assertEqual(len(cloud), 256)
		mesh = self.scene.objects[0].world_mesh
		self.assertLess(np.abs(mesh.signed_distances(cloud.points)).max(),
				1e-6)
		np.testing.assert_allclose(np.linalg.norm(cloud.normals, axis=1), 1.0,
				atol=1e-12)

	def testThinned(self):
		"""
		Larger sets are thinned without repeats.
		"""
		cloud = scenes.fuse_point_cloud(self.scene, self.rig, 5, size=8)
		self.assertEqual(len(cloud), 8)
		self.assertEqual(len(np.unique(cloud.points, axis=0)), 8)

	def testDeterministic(self):
		a = scenes.fuse_point_cloud(self.scene, self.rig, 6, size=100)
		b = scenes.fuse_point_cloud(self.scene, self.rig, 6, size=100)
		np.testing.assert_array_equal(a.points, b.points)

	def testEmptyView(self):
		self.assertRaises(EmptyView, scenes.fuse_point_cloud,
				Scene((0.6, 0.6), [], 0), self.rig, 0, size=16)


class TestSynthLabels(unittest.TestCase):

	def testSphere(self):
		"""
		Labels stand just off the surface and penetrate nothing.
		"""
		hand = find_hand("simple-2f")
		scene = one_object_scene("sphere", [0.0, 0.0, 0.05])
		labels = scenes.synth_labels(scene, hand, 8, 41)
		self.assertGreater(len(labels), 0)

		sphere = scene.objects[0].world_mesh
		meshes = scene.meshes()
		for label in labels:
			gap = -sphere.signed_distances(label.palm_reference_world)[0]
			self.assertGreaterEqual(gap, 0.0)
			self.assertLessEqual(gap, 0.005 + 0.004)

			g = GraspConfig(np.zeros(3), label.palm_pose.translation,
					Rot6D.from_matrix(label.palm_pose.rotation), label.theta)
			self.assertEqual(losses.collision_loss(g, hand, meshes).value, 0.0)

	def testDeterministic(self):
		hand = find_hand("simple-2f")
		scene = one_object_scene("can", [0.0, 0.0, 0.035])
		self.assertEqual(scenes.synth_labels(scene, hand, 3, 42),
				scenes.synth_labels(scene, hand, 3, 42))


class TestDataset(unittest.TestCase):

	def config(self, **changes):
		document = {
			"scene_count": 2,
			"object_count": [1, 1],
			"table_extent": [0.3, 0.3],
			"labels_per_object": 2,
			"cloud_size": 64,
			"objects": ["box-small"],
			"cameras": [c.to_dict() for c in small_rig((0.3, 0.3))],
		}
		document.update(changes)
		return DatasetConfig.from_dict(document)

	def testConfig(self):
		config = DatasetConfig()
		self.assertEqual(config.object_count, (3, 5))
		self.assertEqual(config.cloud_size, 2048)
		self.assertEqual(len(config.camera_rig()), 4)

		self.assertRaisesRegex(ConfigError, "unknown fields",
				DatasetConfig.from_dict, {"scenes": 3})
		self.assertRaises(ConfigError, DatasetConfig.from_dict,
				{"object_count": [3, 2]})
		self.assertRaises(ConfigError, DatasetConfig.from_dict,
				{"objects": ["teapot"]})
		self.assertRaises(ConfigError, DatasetConfig.from_dict,
				{"standard_pose": 1})
		self.assertRaises(ConfigError, DatasetConfig.from_dict,
				{"cameras": [{"position": [0, 0, 0]}]})
		self.assertRaises(ConfigError, DatasetConfig.from_dict, [])

	def testGenerate(self):
		hand = find_hand("simple-2f")
		with tempfile.TemporaryDirectory() as root:
			records = scenes.generate_dataset(self.config(), root, 7, hand)
			self.assertEqual([r.index for r in records], [0, 1])
			for record in records:
				self.assertEqual(len(record.cloud), 64)
				self.assertEqual(len(record.labelset), 64)
				directory = scenes.scene_dir(root, record.index)
				for name in (C.SCENE_FILE, C.CLOUD_FILE, C.LABELS_FILE,
						C.LABELSET_FILE):
					self.assertTrue(os.path.isfile(os.path.join(directory,
							name)))
				self.assertEqual(scenes.read_scene(os.path.join(directory,
						C.SCENE_FILE)), record.scene)

	def testReproducible(self):
		"""
		The same seed writes byte-identical files.
		"""
		hand = find_hand("simple-2f")
		with tempfile.TemporaryDirectory() as first, \
				tempfile.TemporaryDirectory() as second:
			scenes.generate_dataset(self.config(scene_count=1), first, 9,
					hand)
			scenes.generate_dataset(self.config(scene_count=1), second, 9,
					hand)
			for name in (C.SCENE_FILE, C.CLOUD_FILE, C.LABELS_FILE,
					C.LABELSET_FILE):
				with open(os.path.join(scenes.scene_dir(first, 0), name),
						"rb") as a, open(os.path.join(scenes.scene_dir(second,
						0), name), "rb") as b:
					self.assertEqual(a.read(), b.read(), name)


if __name__ == "__main__":
	unittest.main()

#!/usr/bin/python3

# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

import unittest
import numpy as np
from densegrasp import primitives
from densegrasp.validate import ParseError


class TestShapes(unittest.TestCase):

	def testBox(self):
		mesh = primitives.box([0.2, 0.4, 0.6], center=[1.0, 0.0, 0.0])
		self.assertAlmostEqual(mesh.volume, 0.048, places=13)
		np.testing.assert_allclose(mesh.center_mass, [1.0, 0.0, 0.0],
				atol=1e-15)

	def testCylinderVolume(self):
		"""
		A 24-gon prism holds the inscribed polygon's area times height.
		"""
		mesh = primitives.cylinder(0.03, 0.1)
		polygon = 0.5 * 24 * 0.03 ** 2 * np.sin(2 * np.pi / 24)
		self.assertAlmostEqual(mesh.volume, polygon * 0.1, places=15)

	def testFrustumNarrowsUpwards(self):
		mesh = primitives.frustum(0.04, 0.015, 0.08)
		top = mesh.vertices[mesh.vertices[:, 2] > 0]
		self.assertAlmostEqual(np.linalg.norm(top[:, :2], axis=1).max(),
				0.015, places=15)

	def testIcosphere(self):
		"""
		Vertices lie on the sphere and the volume approaches the ball's.
		"""
		mesh = primitives.icosphere(0.04, subdivisions=3)
		np.testing.assert_allclose(np.linalg.norm(mesh.vertices, axis=1),
				0.04, rtol=1e-14)
		ball = 4.0 / 3.0 * np.pi * 0.04 ** 3
		self.assertLess(mesh.volume, ball)
		self.assertGreater(mesh.volume, 0.97 * ball)

	def testLBlock(self):
		"""
		The L shape has the area of its two arms minus their overlap.
		"""
		mesh = primitives.l_block(0.10, 0.07, 0.03, 0.04)
		area = 0.10 * 0.03 + 0.07 * 0.03 - 0.03 * 0.03
		self.assertAlmostEqual(mesh.volume, area * 0.04, places=15)


class TestLibrary(unittest.TestCase):

	def testEveryObjectBuilds(self):
		"""
		Every library object is a valid mesh of hand-held size.
		"""
		for mesh_id in primitives.object_ids():
			mesh = primitives.make_object(mesh_id)
			self.assertGreater(mesh.volume, 0)
			self.assertLess((mesh.upper - mesh.lower).max(), 0.2)

	def testUnknownObject(self):
		self.assertRaisesRegex(ParseError, "unknown object id",
				primitives.make_object, "teapot")

	def testFromSpec(self):
		mesh = primitives.from_spec({"type": "box", "extents": [1, 2, 3]})
		self.assertAlmostEqual(mesh.volume, 6.0, places=14)

		self.assertRaisesRegex(ParseError, "unknown primitive",
				primitives.from_spec, {"type": "torus"})
		self.assertRaisesRegex(ParseError, "missing",
				primitives.from_spec, {"type": "sphere"})


if __name__ == "__main__":
	unittest.main()

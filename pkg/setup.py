#!/usr/bin/python3

# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

from setuptools import setup

setup(
		name="densegrasp",
		version="1",
		description="A toolkit for dense differentiable multi-fingered grasp "
				"synthesis",
		license="WTFPL",
		packages=["densegrasp", "densegrasp.test"],
		package_data={
				"densegrasp": ["data/hands/*"],
				"densegrasp.test": ["testdata/*"],
			},
		install_requires=[
				"numpy>=1.20",
				"scipy>=1.8",
			],
		scripts=[
			"bin/densegrasp-gen-scenes",
			"bin/densegrasp-label",
			"bin/densegrasp-plan",
			"bin/densegrasp-eval",
			"bin/densegrasp-grad-check",
			],
	)

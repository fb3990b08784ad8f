# This program is free software. It comes without any warranty, to
# the extent permitted by applicable law. You can redistribute it
# and/or modify it under the terms of the Do What The Fuck You Want
# To Public License, Version 2, as published by Sam Hocevar. See
# the COPYING file included with this distribution or
# http://sam.zoy.org/wtfpl/COPYING for more details.

VERSION = "1"

# Numerical tolerances.
UNIT_TOLERANCE = 1e-9
DEGENERATE_EPSILON = 1e-8

# Hand point sets.
COLLISION_POINT_COUNT = 2000
INNER_POINT_COUNT = 45

# Label matching: palm reference within this many meters of the object point.
MATCH_RADIUS = 0.005

# Dense prediction and selection.
CLOUD_SIZE = 2048
CANDIDATE_COUNT = 512
PRUNE_THRESHOLD = 0.15
SELECT_COUNT = 4
HARD_EXAMPLE_COUNT = 64

# Loss weights w1..w5 of the fine-tuning configuration.
DEFAULT_WEIGHTS = (1.0, 1.0, 1.0, 0.0, 1.0)

# Contact model.
FRICTION_MU = 0.5
CONE_EDGES = 8
DIRECTION_COUNT = 64
# Directions behind the reference Q1 that sets the success threshold.
REFERENCE_DIRECTION_COUNT = 100000
CONTACT_THRESHOLD = 0.002

# Validity and sweeps.
PENETRATION_TOLERANCE = 0.002
# Back-off of selected grasps: steps per pre-grasp distance, and how many
# pre-grasp distances the palm may retreat in all.
BACKOFF_STEPS = 8
BACKOFF_LIMIT = 3
SWEEP_TOLERANCE = 1e-4
SCENE_TOLERANCE = 1e-4
PLACEMENT_ATTEMPTS = 100
OVERLAP_SAMPLES = 500

# Camera rig.
IMAGE_WIDTH = 160
IMAGE_HEIGHT = 120
VERTICAL_FOV = 1.0471975511965976

# Dataset layout.
SCENE_DIR = "scene_{0:04d}"
SCENE_FILE = "scene.json"
CLOUD_FILE = "cloud.bin"
LABELS_FILE = "labels.jsonl"
LABELSET_FILE = "labelset.json"
MANIFEST_FILE = "manifest.json"
RESULTS_FILE = "results.jsonl"
CANDIDATES_FILE = "candidates.jsonl"
EVAL_FILE = "eval.json"

# Little-endian x, y, z, nx, ny, nz per cloud record.
CLOUD_RECORD = "<6d"

HAND_PATH_ENV = "DENSEGRASP_HAND_PATH"

# Command-line exit codes.
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_MODEL = 4
EXIT_REFERENCE = 5
EXIT_VERIFICATION = 6

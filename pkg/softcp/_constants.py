# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

import os

VERSION = "0.1.0"
TOOL_NAME = "softcp"
PACKAGE_ROOT = os.path.dirname(os.path.abspath(__file__))
CONFIG_DIR = os.path.expanduser(os.path.join("~", ".softcp"))
CONFIG_ENV_VAR_PREFIX = "SOFTCP"
RUN_CONFIG_SCHEMA_PATH = os.path.join(PACKAGE_ROOT, "assets", "run-config.schema.json")
DEFAULT_CONFIG_PATH = os.path.join(PACKAGE_ROOT, "assets", "default-config.yaml")

# Dataset layout
DATASET_IMAGES_DIR = "images"
DATASET_MASKS_DIR = "masks"
MASK_STEM_SUFFIXES = ("_mask",)

# Output layout
OUTPUT_IMAGES_DIR = "images"
OUTPUT_MASKS_DIR = "masks"
OUTPUT_PREVIEW_DIR = "preview"
OUTPUT_LESIONS_DIR = "lesions"
MANIFEST_NAME = "manifest.jsonl"
SYNTHETIC_STEM_TEMPLATE = "syn_{:06d}"

# Soft-mask
BINARIZE_THRESHOLD = 1e-5

# Synthesis
DEFAULT_OUTPUT_SIZE = (256, 256)
DEFAULT_MAX_ATTEMPTS = 100
DEFAULT_MAX_RETRIES = 20
DEFAULT_MIN_AREA = 10

# Poisson solver
POISSON_DEFAULT_TOLERANCE = 1e-7
POISSON_DEFAULT_MAX_ITERATIONS = 5000

# Preview heatmap colormap
PREVIEW_COLORMAP = "inferno"

# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
placement: Anatomical placement constraints and rejection-sampled paste offsets.

A candidate offset is accepted iff
    |lesion & reference| > s1   (the lesion intersects the reference substance)
    |lesion & lesions|   < s2   (overlap with lesions already in the scene stays below s2)
Both inequalities are strict. With s2 = 1 an accepted lesion touches no existing lesion.
A reference_class of None stands for the whole frame.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from knack.log import get_logger

from softcp._constants import DEFAULT_MAX_ATTEMPTS
from softcp.common.shared import PlacementRejection
from softcp.imaging.blend import PasteOffset, paste_window

logger = get_logger(__name__)


@dataclass(frozen=True)
class PlacementConstraints(object):
    """
    Args:
        s1 (int|None): minimum-exclusive lesion/reference overlap; None uses floor(s1_fraction * area).
        s2 (int): maximum-exclusive lesion/lesion overlap.
        reference_class (int|None): class the lesion must intersect; None means the whole frame.
        lesion_class (int): class of lesions in the scene.
        max_attempts (int): offsets drawn before giving up.
        s1_fraction (float): area fraction used when s1 is None.
    """
    s1: Optional[int] = None
    s2: int = 1
    reference_class: Optional[int] = None
    lesion_class: int = 1
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    s1_fraction: float = 0.5

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError('max_attempts must be >= 1, got {}'.format(self.max_attempts))
        if self.s1 is not None and self.s1 < 0:
            raise ValueError('s1 must be >= 0, got {}'.format(self.s1))
        if not 0.0 <= self.s1_fraction <= 1.0:
            raise ValueError('s1_fraction must lie in [0, 1]')

    def threshold_s1(self, lesion_area):
        if self.s1 is not None:
            return self.s1
        return int(np.floor(self.s1_fraction * lesion_area))

    def resolve(self, lesion_area):
        """Copy with s1 fixed to an absolute pixel count for this lesion."""
        return PlacementConstraints(s1=self.threshold_s1(lesion_area), s2=self.s2,
                                    reference_class=self.reference_class, lesion_class=self.lesion_class,
                                    max_attempts=self.max_attempts, s1_fraction=self.s1_fraction)

    def to_dict(self):
        return {'s1': self.s1, 's2': self.s2, 'reference_class': self.reference_class,
                'lesion_class': self.lesion_class, 'max_attempts': self.max_attempts,
                's1_fraction': self.s1_fraction}


@dataclass(frozen=True)
class PlacementCheck(object):
    accepted: bool
    overlap_reference: int
    overlap_lesions: int
    reason: Optional[PlacementRejection] = None

    def __bool__(self):
        return self.accepted


@dataclass(frozen=True)
class PlacementResult(object):
    offset: PasteOffset
    attempts_used: int
    overlap_reference: int
    overlap_lesions: int
    s1: int
    s2: int
    rejections: Dict[str, int] = field(default_factory=dict)

    def to_dict(self):
        return {'offset': self.offset.to_dict(), 'attempts_used': self.attempts_used,
                'overlap_reference': self.overlap_reference, 'overlap_lesions': self.overlap_lesions,
                's1': self.s1, 's2': self.s2, 'rejections': dict(self.rejections)}


@dataclass(frozen=True)
class PlacementExhausted(object):
    attempts_used: int
    rejections: Dict[str, int] = field(default_factory=dict)

    def __bool__(self):
        return False


def overlap_count(a, b, at):
    """Number of pixels set in both a (translated by at) and b."""
    a = np.asarray(a, dtype=bool)
    rows, cols = paste_window(a.shape, b.shape, at)
    return int(np.count_nonzero(a & np.asarray(b, dtype=bool)[rows, cols]))


def reference_support(scene, reference_class):
    if reference_class is None:
        return np.ones(scene.shape, dtype=bool)
    return scene == reference_class


def check_placement(lesion, at, scene, c):
    """
    Evaluate both constraints for a lesion at an offset.

    Args:
        lesion (np.ndarray): binary lesion mask.
        at (PasteOffset): candidate offset.
        scene (np.ndarray): label map the lesion would be pasted into.
        c (PlacementConstraints): thresholds and classes.

    Returns:
        check (PlacementCheck): falsy on rejection, with the failing constraint and both counts.
    """
    lesion = np.asarray(lesion, dtype=bool)
    s1 = c.threshold_s1(int(lesion.sum()))
    overlap_reference = overlap_count(lesion, reference_support(scene, c.reference_class), at)
    overlap_lesions = overlap_count(lesion, scene == c.lesion_class, at)
    reason = None
    if not overlap_reference > s1:
        reason = PlacementRejection.reference
    elif not overlap_lesions < c.s2:
        reason = PlacementRejection.lesion_overlap
    return PlacementCheck(reason is None, overlap_reference, overlap_lesions, reason)


def find_placement(lesion, scene, c, rng):
    """
    Draw offsets uniformly over every position where the lesion rectangle fits and return the
    first accepted one.

    Returns:
        result (PlacementResult|PlacementExhausted)
    """
    lesion = np.asarray(lesion, dtype=bool)
    if not lesion.any():
        raise ValueError('Cannot place an empty lesion mask')
    h, w = lesion.shape
    height, width = scene.shape
    if h > height or w > width:
        raise ValueError('Lesion {}x{} does not fit in scene {}x{}'.format(h, w, height, width))

    resolved = c.resolve(int(lesion.sum()))
    rejections = Counter()
    for attempt in range(1, c.max_attempts + 1):
        at = PasteOffset(int(rng.integers(0, height - h + 1)), int(rng.integers(0, width - w + 1)))
        check = check_placement(lesion, at, scene, resolved)
        if check:
            return PlacementResult(at, attempt, check.overlap_reference, check.overlap_lesions,
                                   resolved.s1, resolved.s2, dict(rejections))
        rejections[check.reason.value] += 1

    logger.debug('Placement exhausted after %s attempts: %s', c.max_attempts, dict(rejections))
    return PlacementExhausted(c.max_attempts, dict(rejections))

# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
softmask: Geometrically decaying weight map around a lesion.

The mask is eroded k_erode times to a core of weight 1. Each of the k_dilate following
dilations reaches one new Chebyshev ring; the ring reached at step j gets alpha ** j and
pixels that already carry a weight keep it. An empty core yields an all-zero map.
"""

from dataclasses import asdict, dataclass

import numpy as np

from softcp._constants import BINARIZE_THRESHOLD
from softcp.imaging.morphology import binarize, dilate, erode


@dataclass(frozen=True)
class SoftMaskParams(object):
    """
    Soft-mask parameters. The defaults are tunable starting points, not calibrated values.

    Args:
        k_erode (int): erosion iterations >= 0.
        k_dilate (int): dilation iterations >= 0.
        alpha (float): softening coefficient in (0, 1).
        binarize_threshold (float): support threshold > 0 used between dilations.
    """
    k_erode: int = 1
    k_dilate: int = 5
    alpha: float = 0.5
    binarize_threshold: float = BINARIZE_THRESHOLD

    def __post_init__(self):
        if self.k_erode < 0 or self.k_dilate < 0:
            raise ValueError('k_erode and k_dilate must be >= 0')
        if not 0.0 < self.alpha < 1.0:
            raise ValueError('alpha must lie in (0, 1), got {}'.format(self.alpha))
        if self.binarize_threshold <= 0:
            raise ValueError('binarize_threshold must be > 0, got {}'.format(self.binarize_threshold))
        # The outermost ring must survive binarization or the next dilation starts short.
        if self.k_dilate and self.ring_weight(self.k_dilate) <= self.binarize_threshold:
            raise ValueError('alpha ** k_dilate ({:.3g}) must exceed binarize_threshold ({:.3g})'.format(
                self.ring_weight(self.k_dilate), self.binarize_threshold))

    def ring_weight(self, ring):
        return self.alpha ** ring

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(k_erode=int(d.get('k_erode', 1)),
                   k_dilate=int(d.get('k_dilate', 5)),
                   alpha=float(d.get('alpha', 0.5)),
                   binarize_threshold=float(d.get('binarize_threshold', BINARIZE_THRESHOLD)))


def compute_soft_mask(mask, params):
    """
    Build the soft-mask of a binary lesion mask.

    Args:
        mask (np.ndarray): binary mask (H, W).
        params (SoftMaskParams): erosion/dilation counts and decay.

    Returns:
        soft (np.ndarray): float64 (H, W) with values in {0, 1} U {alpha ** j}.
    """
    core = np.asarray(mask, dtype=bool)
    for _ in range(params.k_erode):
        if not core.any():
            break
        core = erode(core)

    soft = core.astype(np.float64)
    if not core.any():
        return soft

    for ring in range(1, params.k_dilate + 1):
        reached = binarize(soft, params.binarize_threshold)
        frontier = dilate(reached) & ~reached
        if not frontier.any():
            break
        soft[frontier] = params.ring_weight(ring)
    return soft

# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
metrics: Pixel-level segmentation scores.

Empty prediction against empty truth scores dsc = iou = 1.
"""

from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class ConfusionCounts(object):
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other):
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SegScores(object):
    dsc: float
    accuracy: float
    iou: float

    def to_dict(self):
        return asdict(self)


def confusion(pred, truth):
    """Per-pixel counts of a binary prediction against binary truth."""
    pred = np.asarray(pred, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if pred.shape != truth.shape:
        raise ValueError('Prediction {} and truth {} differ in size'.format(pred.shape, truth.shape))
    tp = int(np.count_nonzero(pred & truth))
    fp = int(np.count_nonzero(pred & ~truth))
    fn = int(np.count_nonzero(~pred & truth))
    return ConfusionCounts(tp=tp, fp=fp, tn=pred.size - tp - fp - fn, fn=fn)


def scores(c):
    """DSC = 2tp / (2tp + fp + fn), accuracy = (tp + tn) / total, IoU = tp / (tp + fp + fn)."""
    union = c.tp + c.fp + c.fn
    if union == 0:
        dsc = iou = 1.0
    else:
        dsc = 2.0 * c.tp / (2 * c.tp + c.fp + c.fn)
        iou = float(c.tp) / union
    accuracy = float(c.tp + c.tn) / c.total if c.total else 1.0
    return SegScores(dsc=dsc, accuracy=accuracy, iou=iou)


def class_confusion(pred_labels, truth_labels, class_id):
    """One-vs-rest counts for a single class of two label maps."""
    return confusion(np.asarray(pred_labels) == class_id, np.asarray(truth_labels) == class_id)

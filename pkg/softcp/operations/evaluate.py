# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
evaluate: Per-class segmentation scores over paired mask directories.

Counts are summed over all image pairs before scoring (micro); mean_dsc averages the
per-image DSC (macro). Classes are scored one-vs-rest; background (class 0) is skipped.
"""

import csv
from collections import OrderedDict
from glob import glob
from os.path import basename, join, splitext

from knack.log import get_logger
from knack.util import CLIError

from softcp._constants import MASK_STEM_SUFFIXES
from softcp.assets.user_messages import ERROR_EVAL_NO_PAIRS
from softcp.common.utility import parse_class_pairs
from softcp.imaging.metrics import ConfusionCounts, class_confusion, scores
from softcp.imaging.raster import load_label_map

logger = get_logger(__name__)

CSV_COLUMNS = ('class', 'tp', 'fp', 'fn', 'tn', 'dsc', 'iou', 'accuracy', 'mean_dsc', 'images')
BINARY_CLASSES = {0: 0, 255: 1}


def _index_masks(directory):
    result = {}
    for path in glob(join(directory, '*.png')):
        stem = splitext(basename(path))[0]
        for suffix in MASK_STEM_SUFFIXES:
            if stem.endswith(suffix) and len(stem) > len(suffix):
                stem = stem[:-len(suffix)]
        result[stem] = path
    return result


def evaluate_directories(pred_dir, truth_dir, class_config):
    """
    Args:
        pred_dir (str): predicted masks.
        truth_dir (str): ground truth masks, paired with predictions by stem.
        class_config (dict): pixel value -> class id, shared by both directories.

    Returns:
        rows (list): one OrderedDict per foreground class, keyed by CSV_COLUMNS.
    """
    predictions = _index_masks(pred_dir)
    truths = _index_masks(truth_dir)
    stems = sorted(set(predictions) & set(truths))
    if not stems:
        raise CLIError(ERROR_EVAL_NO_PAIRS(pred_dir, truth_dir))
    for stem in sorted(set(predictions) ^ set(truths)):
        logger.warning("'%s' has no counterpart and is not scored", stem)

    classes = sorted(c for c in set(class_config.values()) if c != 0)
    totals = {c: ConfusionCounts() for c in classes}
    per_image_dsc = {c: [] for c in classes}
    for stem in stems:
        try:
            pred = load_label_map(predictions[stem], class_config)
            truth = load_label_map(truths[stem], class_config)
            for class_id in classes:
                counts = class_confusion(pred, truth, class_id)
                totals[class_id] += counts
                per_image_dsc[class_id].append(scores(counts).dsc)
        except (IOError, ValueError) as e:
            raise CLIError("'{}': {}".format(stem, e))

    rows = []
    for class_id in classes:
        counts = totals[class_id]
        result = scores(counts)
        rows.append(OrderedDict([
            ('class', class_id), ('tp', counts.tp), ('fp', counts.fp), ('fn', counts.fn), ('tn', counts.tn),
            ('dsc', result.dsc), ('iou', result.iou), ('accuracy', result.accuracy),
            ('mean_dsc', sum(per_image_dsc[class_id]) / len(per_image_dsc[class_id])),
            ('images', len(stems))]))
    logger.info('Scored %s image pair(s) over %s class(es)', len(stems), len(classes))
    return rows


def write_scores_csv(path, rows):
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def softcp_eval(pred_dir, truth_dir, classes=None, config=None, out=None):
    class_config = BINARY_CLASSES
    if classes:
        try:
            class_config = parse_class_pairs(classes)
        except ValueError as e:
            raise CLIError(e)
    elif config:
        from softcp.common.config import load_run_config

        raw, _ = load_run_config(config)
        class_config = {int(k): int(v) for k, v in raw['classes'].items()}

    rows = evaluate_directories(pred_dir, truth_dir, class_config)
    if out:
        write_scores_csv(out, rows)
        logger.info("Wrote scores to '%s'", out)
    return rows

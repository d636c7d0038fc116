# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
Argument validators. A ValueError raised here is reported by the parser as a usage error.
"""

from softcp.assets.user_messages import ERROR_COUNT_AND_RATIO
from softcp.common.utility import parse_class_pairs, parse_ratio


def validate_count_ratio(namespace):
    args = vars(namespace)
    count = args.get('count')
    ratio = args.get('ratio')
    if count is not None and ratio is not None:
        raise ValueError(ERROR_COUNT_AND_RATIO())
    if count is not None and count < 0:
        raise ValueError('--count must be >= 0')
    if ratio is not None:
        parse_ratio(ratio)


def validate_seed(namespace):
    seed = getattr(namespace, 'seed', None)
    if seed is not None and not 0 <= seed < 2 ** 64:
        raise ValueError('--seed must be an unsigned 64-bit integer')


def validate_jobs(namespace):
    jobs = getattr(namespace, 'jobs', None)
    if jobs is not None and jobs < 1:
        raise ValueError('--jobs must be >= 1')


def validate_preview_range(namespace):
    if namespace.count < 1:
        raise ValueError('--count must be >= 1')
    if namespace.start_index < 0:
        raise ValueError('--start-index must be >= 0')


def validate_classes(namespace):
    if getattr(namespace, 'classes', None):
        parse_class_pairs(namespace.classes)

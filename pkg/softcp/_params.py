# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
CLI parameter definitions.
"""

from knack.arguments import CLIArgumentType, CaseInsensitiveList
from softcp.common.shared import BlendModeType
from softcp._validators import (validate_classes, validate_count_ratio, validate_jobs, validate_preview_range,
                                validate_seed)


def get_enum_type(data):
    return CLIArgumentType(type=str.lower, choices=CaseInsensitiveList([item.value for item in data]))


config_type = CLIArgumentType(
    options_list=['--config', '-c'],
    help='Run configuration YAML. Create one with "softcp init-config".')

blend_type = CLIArgumentType(
    get_enum_type(BlendModeType),
    options_list=['--blend'],
    help='Blend mode override (config key blend.mode).')


# pylint: disable=too-many-statements
def load_arguments(self, _):
    """
    Load CLI Args for Knack parser
    """
    with self.argument_context('') as context:
        context.argument('config', arg_type=config_type)
        context.argument('seed', options_list=['--seed'], type=int, validator=validate_seed,
                         help='Master seed override. Sample i depends only on (seed, i).')
        context.argument('out', options_list=['--out'],
                         help='Output directory override (config key output_root).')

    with self.argument_context('augment') as context:
        context.argument('ratio', options_list=['--ratio'], validator=validate_count_ratio,
                         help='Real:synthetic ratio, e.g. 3:1. Generates floor(real / ratio) samples.')
        context.argument('count', options_list=['--count'], type=int,
                         help='Exact number of synthetic samples. Mutually exclusive with --ratio.')
        context.argument('blend', arg_type=blend_type)
        context.argument('jobs', options_list=['--jobs', '-j'], type=int, validator=validate_jobs,
                         help='Worker processes. Defaults to the number of cores; output does not depend on it.')

    with self.argument_context('preview') as context:
        context.argument('blend', arg_type=blend_type)
        context.argument('count', options_list=['--count'], type=int, validator=validate_preview_range,
                         help='Number of sample indices to render.')
        context.argument('start_index', options_list=['--start-index'], type=int,
                         help='First sample index to render.')

    with self.argument_context('extract-lesions') as context:
        context.argument('out', options_list=['--out'],
                         help='Directory for the lesion PNG pairs. Defaults to <output_root>/lesions.')

    with self.argument_context('validate') as context:
        context.argument('manifest', options_list=['--manifest', '-m'],
                         help='Path to manifest.jsonl. Output files are resolved next to it.')
        context.argument('dataset_root', options_list=['--dataset-root'],
                         help='Dataset root override. Defaults to the root recorded in the manifest header.')

    with self.argument_context('eval') as context:
        context.argument('pred_dir', options_list=['--pred-dir'], help='Directory of predicted mask PNGs.')
        context.argument('truth_dir', options_list=['--truth-dir'], help='Directory of ground truth mask PNGs.')
        context.argument('classes', options_list=['--classes'], validator=validate_classes,
                         help='Pixel value to class mapping, e.g. "0=0;128=1;255=2". '
                         'Defaults to the config classes, or 0=0;255=1.')
        context.argument('out', options_list=['--out'], help='Write the per-class table as CSV.')

    with self.argument_context('init-config') as context:
        context.argument('out', options_list=['--out'], help='Destination YAML file.')
        context.argument('force', options_list=['--force'], action='store_true',
                         help='Overwrite an existing file.')

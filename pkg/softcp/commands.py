# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
Load CLI commands
"""

from softcp import config_ops, dataset_ops, evaluate_ops, pipeline_ops


def load_command_table(self, _):
    """
    Load CLI commands
    """
    with self.command_group('', pipeline_ops) as cmd_group:
        cmd_group.command('augment', 'softcp_augment')
        cmd_group.command('preview', 'softcp_preview')

    with self.command_group('', dataset_ops) as cmd_group:
        cmd_group.command('extract-lesions', 'softcp_extract_lesions')
        cmd_group.command('validate', 'softcp_validate')

    with self.command_group('', evaluate_ops) as cmd_group:
        cmd_group.command('eval', 'softcp_eval')

    with self.command_group('', config_ops) as cmd_group:
        cmd_group.command('init-config', 'softcp_init_config')

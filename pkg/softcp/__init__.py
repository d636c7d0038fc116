# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

from knack.arguments import ArgumentsContext
from knack.commands import CLICommandsLoader, CommandGroup
from softcp._constants import VERSION
import softcp._help  # pylint: disable=unused-import


pipeline_ops = 'softcp.operations.pipeline#{}'
dataset_ops = 'softcp.operations.dataset#{}'
evaluate_ops = 'softcp.operations.evaluate#{}'
config_ops = 'softcp.operations.config#{}'


class SoftCPCommandsLoader(CLICommandsLoader):

    def __init__(self, cli_ctx=None):
        super(SoftCPCommandsLoader, self).__init__(cli_ctx=cli_ctx)

    def command_group(self, group_name, operations_tmpl, **kwargs):
        return CommandGroup(self, group_name, operations_tmpl, **kwargs)

    def argument_context(self, scope, **kwargs):
        return ArgumentsContext(self, scope, **kwargs)

    def load_command_table(self, args):
        from softcp.commands import load_command_table
        load_command_table(self, args)
        return super(SoftCPCommandsLoader, self).load_command_table(args)

    def load_arguments(self, command):
        from softcp._params import load_arguments
        load_arguments(self, command)
        super(SoftCPCommandsLoader, self).load_arguments(command)


COMMAND_LOADER_CLS = SoftCPCommandsLoader

__version__ = VERSION

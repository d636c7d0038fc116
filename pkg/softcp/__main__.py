# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

import sys

from knack import CLI

from softcp import SoftCPCommandsLoader
from softcp._constants import CONFIG_DIR, CONFIG_ENV_VAR_PREFIX, TOOL_NAME, VERSION


class SoftCPCLI(CLI):

    def get_cli_version(self):
        return VERSION


def get_default_cli(config_dir=CONFIG_DIR):
    return SoftCPCLI(cli_name=TOOL_NAME,
                     config_dir=config_dir,
                     config_env_var_prefix=CONFIG_ENV_VAR_PREFIX,
                     commands_loader_cls=SoftCPCommandsLoader)


def dispatch(argv=None, out_file=None, config_dir=CONFIG_DIR):
    """
    Run one command.

    Returns:
        exit_code (int): 0 on success, 1 on runtime failure, 2 on usage error.
    """
    cli = get_default_cli(config_dir)
    return cli.invoke(sys.argv[1:] if argv is None else argv, out_file=out_file or sys.stdout)


def main():
    sys.exit(dispatch())


if __name__ == '__main__':
    main()

# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

from os.path import exists

from knack.log import get_logger
from knack.util import CLIError

from softcp._constants import DEFAULT_CONFIG_PATH
from softcp.assets.user_messages import ERROR_OUTPUT_EXISTS
from softcp.common.utility import read_file_content

logger = get_logger(__name__)


def softcp_init_config(out='softcp.yaml', force=False):
    """Write the commented default run configuration."""
    if exists(out) and not force:
        raise CLIError(ERROR_OUTPUT_EXISTS(out))
    content = read_file_content(DEFAULT_CONFIG_PATH)
    with open(out, 'w', encoding='utf-8', newline='\n') as f:
        f.write(content)
    logger.info("Default configuration written to '%s'", out)
    return {'config': out}

# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
config: Load, merge and validate run configurations.

A run configuration is the packaged default-config.yaml deep-merged with the user file,
then with command line overrides. Overrides use dotted keys ('blend.mode') and are
returned separately so they can be recorded next to the effective configuration.
"""

import copy
import json
from os.path import exists

import yaml
from jsonschema import validate
from jsonschema.exceptions import SchemaError, ValidationError
from knack.log import get_logger
from knack.util import CLIError

from softcp._constants import DEFAULT_CONFIG_PATH, RUN_CONFIG_SCHEMA_PATH
from softcp.assets.user_messages import (ERROR_CONFIG_INVALID, ERROR_CONFIG_NOT_FOUND,
                                         ERROR_CONFIG_UNPARSABLE, ERROR_COUNT_AND_RATIO)
from softcp.common.utility import read_file_content

logger = get_logger(__name__)

# Mappings keyed by integers in YAML; kept as strings so the config survives a JSON round trip.
_INT_KEYED_SECTIONS = ('classes', 'lesions_per_image')


def _parse_yaml(text, source):
    try:
        content = yaml.safe_load(text)
    except yaml.YAMLError as ye:
        raise CLIError(ERROR_CONFIG_UNPARSABLE(source, ye))
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise CLIError(ERROR_CONFIG_INVALID(source, 'top level must be a mapping'))
    return content


def load_default_config():
    return _parse_yaml(read_file_content(DEFAULT_CONFIG_PATH), DEFAULT_CONFIG_PATH)


def read_config_file(path):
    if not exists(path):
        raise CLIError(ERROR_CONFIG_NOT_FOUND(path))
    logger.info("Reading configuration from '%s'", path)
    return _parse_yaml(read_file_content(path), path)


def deep_merge(base, override):
    """
    Recursively merge override into a copy of base. Mapping sections merge key by key,
    except the int keyed sections which replace wholesale.
    """
    result = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(result.get(key), dict) and key not in _INT_KEYED_SECTIONS:
            result[key] = deep_merge(result[key], value)
        else:
            result[key] = copy.deepcopy(value)
    return result


def apply_overrides(config, overrides):
    """
    Apply dotted-key overrides; None values are skipped.

    Args:
        config (dict): merged configuration.
        overrides (dict): dotted key -> value.

    Returns:
        (config, applied): the updated copy and the overrides that were actually set.
    """
    result = copy.deepcopy(config)
    applied = {}
    for dotted, value in sorted((overrides or {}).items()):
        if value is None:
            continue
        target = result
        parts = dotted.split('.')
        for part in parts[:-1]:
            target = target.setdefault(part, {})
        target[parts[-1]] = value
        applied[dotted] = value
    # count and ratio are alternatives; setting one from the command line clears the other
    if 'count' in applied and 'ratio' not in applied:
        result['ratio'] = None
    elif 'ratio' in applied and 'count' not in applied:
        result['count'] = None
    return result, applied


def _normalize_keys(config):
    for section in _INT_KEYED_SECTIONS:
        if isinstance(config.get(section), dict):
            config[section] = {str(k): v for k, v in config[section].items()}
    return config


def validate_run_config(config, source='<config>'):
    """ Validate a merged configuration against the packaged run-config schema. """
    if not exists(RUN_CONFIG_SCHEMA_PATH):
        logger.warning("Invalid schema path %s, skipping validation...", RUN_CONFIG_SCHEMA_PATH)
        return config

    logger.info("Validating run configuration...")
    schema_content = json.loads(read_file_content(RUN_CONFIG_SCHEMA_PATH))
    try:
        validate(instance=config, schema=schema_content)
    except ValidationError as ve:
        location = '.'.join(str(p) for p in ve.absolute_path) or '<root>'
        raise CLIError(ERROR_CONFIG_INVALID(source, '{}: {}'.format(location, ve.message)))
    except SchemaError as se:
        raise CLIError(se)

    for section in _INT_KEYED_SECTIONS:
        for key in config.get(section) or {}:
            if not key.lstrip('-').isdigit():
                raise CLIError(ERROR_CONFIG_INVALID(source, "{} key '{}' is not an integer".format(section, key)))

    if (config.get('count') is None) == (config.get('ratio') is None):
        raise CLIError(ERROR_COUNT_AND_RATIO())
    return config


def load_run_config(path=None, overrides=None):
    """
    Build the effective run configuration.

    Args:
        path (str, None): user YAML file; None runs on the packaged defaults.
        overrides (dict): dotted key -> value from the command line.

    Returns:
        (config, applied): validated configuration dict and the applied overrides.
    """
    config = load_default_config()
    if path:
        config = deep_merge(config, read_config_file(path))
    config, applied = apply_overrides(config, overrides)
    config = _normalize_keys(config)
    validate_run_config(config, path or DEFAULT_CONFIG_PATH)
    if applied:
        logger.info('Command line overrides: %s', applied)
    return config, applied

# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
utility: Define helper functions for 'common' scripts.

"""

import base64
import json
import os

import numpy as np


def validate_key_value_pairs(string):
    """
    Function to validate key-value pairs in the format: a=b;c=d

    Args:
        string (str): semicolon delimited string of key/value pairs.

    Returns (dict, None): a dictionary of key value pairs.
    """
    result = None
    if string:
        kv_list = [x for x in string.split(';') if '=' in x]     # key-value pairs
        result = dict(x.strip().split('=', 1) for x in kv_list)
    return result


def parse_class_pairs(string):
    """ Parses '0=0;255=1' into an int -> int class mapping. """
    pairs = validate_key_value_pairs(string)
    if not pairs:
        return None
    try:
        return {int(k): int(v) for k, v in pairs.items()}
    except ValueError:
        raise ValueError('Class mapping "{}" must hold integer pairs such as 0=0;255=1'.format(string))


def parse_ratio(value):
    """
    Function to normalize a real:synthetic ratio.

    Args:
        value (str, int, float): "3:1", "3" or 3.

    Returns:
        ratio (float): real images per synthetic image, > 0.
    """
    if isinstance(value, str) and ':' in value:
        real, synthetic = (float(part) for part in value.split(':', 1))
        if synthetic <= 0:
            raise ValueError('Ratio "{}" needs a positive synthetic share'.format(value))
        ratio = real / synthetic
    else:
        ratio = float(value)
    if ratio <= 0:
        raise ValueError('Ratio must be > 0, got {}'.format(value))
    return ratio


def read_file_content(file_path):
    with open(file_path, 'r', encoding='utf-8') as f:
        return f.read()


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


def dump_json_line(payload):
    """ Canonical single-line JSON: sorted keys, no whitespace. Identical input gives identical bytes. """
    return json.dumps(payload, sort_keys=True, separators=(',', ':'))


def pack_mask(mask):
    """ Bit-pack a binary mask into {'shape': [h, w], 'bits': base64}. """
    mask = np.asarray(mask, dtype=bool)
    return {'shape': list(mask.shape),
            'bits': base64.b64encode(np.packbits(mask, axis=None).tobytes()).decode('ascii')}


def unpack_mask(packed):
    height, width = (int(v) for v in packed['shape'])
    bits = np.frombuffer(base64.b64decode(packed['bits']), dtype=np.uint8)
    return np.unpackbits(bits, count=height * width).astype(bool).reshape(height, width)

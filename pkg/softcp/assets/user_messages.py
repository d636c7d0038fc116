# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------


def ERROR_CONFIG_NOT_FOUND(path):
    return "Configuration file '{}' was not found. Create one with 'softcp init-config'.".format(path)


def ERROR_CONFIG_UNPARSABLE(path, details):
    return "Configuration file '{}' is not valid YAML: {}".format(path, details)


def ERROR_CONFIG_INVALID(path, details):
    return "Configuration '{}' failed validation: {}".format(path, details)


def ERROR_COUNT_AND_RATIO():
    return "Set exactly one of 'count' (--count) or 'ratio' (--ratio)."


def ERROR_NO_PAIRS(root):
    return ("No image/mask pairs found under '{0}'. Expected '{0}/images/*.png' and "
            "'{0}/masks/*.png' sharing file stems.").format(root)


def ERROR_DIMENSION_MISMATCH(stem, image_size, mask_size):
    return "Image and mask for '{}' differ in size: {}x{} vs {}x{}.".format(
        stem, image_size[0], image_size[1], mask_size[0], mask_size[1])


def ERROR_EMPTY_LESION_BANK(lesion_class, min_area):
    return ("No lesion of class {} with at least {} pixels was found in the dataset. "
            "Check 'classes', 'lesion_class' and 'min_area'.").format(lesion_class, min_area)


def ERROR_SYNTHESIS_EXHAUSTED(index, retries, tally):
    return ("Sample {} could not be synthesized after {} background/lesion draws. "
            "Rejections: {}. Relax 'placement' or raise 'max_retries'.").format(index, retries, tally)


def ERROR_SAMPLE_FAILED(index, details, written, total):
    return "Sample {} failed: {}. {} of {} samples were written before the failure.".format(
        index, details, written, total)


def ERROR_MANIFEST_UNREADABLE(path, line, details):
    return "Manifest '{}' line {} is unreadable: {}".format(path, line, details)


def ERROR_MANIFEST_VIOLATIONS(count, path):
    return "{} violation(s) found in manifest '{}'.".format(count, path)


def ERROR_OUTPUT_EXISTS(path):
    return "'{}' already exists. Use --force to overwrite.".format(path)


def ERROR_EVAL_NO_PAIRS(pred_dir, truth_dir):
    return "No prediction/truth mask pairs with matching stems under '{}' and '{}'.".format(pred_dir, truth_dir)

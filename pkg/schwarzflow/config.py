#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Reads ``key = value`` configuration files.

Example::

    # flow
    epsilon = 1e-3
    background = g0
    epsilons = 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625

Every key must appear in :data:`schwarzflow.constants.DEFAULTS`; values
are coerced to the type of the default. The default amplitudes of the
ancient run are eps_n = 2^-n for n = 4, ..., 8.
"""

import logging

# Original modules
import schwarzflow.constants as constants
import schwarzflow.exceptions as exceptions

logger = logging.getLogger(__name__)

#: Keys whose value must be one of a fixed set.
CHOICES = {
    "background": constants.BACKGROUNDS,
    "ancient_background": constants.BACKGROUNDS,
}


def coerce(key, text):
    """Converts ``text`` to the type of the default of ``key``.

    :raises schwarzflow.exceptions.ConfigError: If the key is unknown or
                                                 the value does not parse.

    """

    if key not in constants.DEFAULTS:
        raise exceptions.ConfigError(msg="unknown key {!r}".format(key))
    default = constants.DEFAULTS[key]
    text = text.strip()
    try:
        if isinstance(default, list):
            value = [float(item) for item in text.split(",") if item.strip()]
            if not value:
                raise ValueError("empty list")
        elif isinstance(default, bool):
            value = {"true": True, "false": False}[text.lower()]
        elif isinstance(default, int):
            value = int(text)
        elif isinstance(default, float):
            value = float(text)
        else:
            value = text
    except (KeyError, ValueError):
        raise exceptions.ConfigError(
            msg="bad value {!r} for {}".format(text, key))
    if key in CHOICES and value not in CHOICES[key]:
        raise exceptions.ConfigError(
            msg="{} must be one of {}".format(key, ", ".join(CHOICES[key])))
    return value


def parse(text, source="<string>"):
    """Parses the contents of a configuration file.

    :returns: Only the keys present in ``text``.
    :rtype: dict
    """

    values = {}
    for number, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise exceptions.ConfigError(
                msg="{}:{}: expected key = value".format(source, number))
        key, _, raw = line.partition("=")
        key = key.strip()
        try:
            values[key] = coerce(key, raw)
        except exceptions.ConfigError as err:
            raise exceptions.ConfigError(
                msg="{}:{}: {}".format(source, number, err))
    return values


def load(path=None, overrides=None):
    """Merges :data:`schwarzflow.constants.DEFAULTS`, the file at ``path``
    and ``overrides``, in that order.

    :param str path: (optional) Configuration file.
    :param dict overrides: (optional) Values already typed, e.g. from the
                           command line; ``None`` entries are ignored.
    :rtype: dict
    :raises schwarzflow.exceptions.ConfigError: If the file cannot be read
                                                 or is malformed.

    """

    merged = dict(constants.DEFAULTS)
    if path is not None:
        try:
            with open(path) as f:
                text = f.read()
        except (IOError, OSError) as err:
            raise exceptions.ConfigError(
                msg="cannot read {}: {}".format(path, err))
        merged.update(parse(text, source=path))
        logger.debug("configuration read from %s", path)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in constants.DEFAULTS:
            raise exceptions.ConfigError(msg="unknown key {!r}".format(key))
        merged[key] = value
    return merged

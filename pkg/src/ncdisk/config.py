"""Enumeration caps; ``NCDISK_CAP`` in the environment overrides the default."""

import os

DEFAULT_CAP = 65536


def enumeration_cap(override=None):
    if override is not None:
        return int(override)
    env = os.environ.get("NCDISK_CAP")
    if env:
        return int(env)
    return DEFAULT_CAP

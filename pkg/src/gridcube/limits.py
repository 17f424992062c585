"""Enumeration caps, overridable through the GRIDCUBE_CAP environment variable."""

import os

REPRESENTATIVE_CAP = 10**6
USO_VERTEX_CAP = 4096


def effective_cap(default):
    """Return the enumeration cap, honoring a GRIDCUBE_CAP override."""
    raw = os.environ.get("GRIDCUBE_CAP")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        return default

"""Decimal rendering shared by the view writer and link builders."""

from __future__ import annotations


def fmt_number(value: float) -> str:
    """Shortest round-trip decimal form; integral values render without '.0'.

    Python's repr already produces the shortest string that round-trips a
    64-bit float, which is the precision the exported files carry.
    """
    if value != value:  # NaN guard; callers use explicit missing markers
        raise ValueError("cannot render NaN")
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(float(value))

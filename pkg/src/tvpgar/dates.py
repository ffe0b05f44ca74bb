"""Year-quarter tokens ("YYYY-Qn") and their integer encoding.

A quarter is stored internally as ``year * 4 + (quarter - 1)`` so that
consecutive quarters differ by one.
"""

from __future__ import annotations

import re

_QUARTER_RE = re.compile(r"^\s*(-?\d{1,4})\s*-?\s*[Qq]([1-4])\s*$")
_YEAR_RE = re.compile(r"^\s*(-?\d{1,4})\s*$")


def parse_quarter(token: str | int) -> int:
    """Parse ``"1950-Q3"`` (or ``"1950Q3"``) into its integer index."""
    if isinstance(token, (int,)) and not isinstance(token, bool):
        return int(token)
    m = _QUARTER_RE.match(str(token))
    if m is None:
        raise ValueError(f"not a year-quarter token: {token!r}")
    return int(m.group(1)) * 4 + int(m.group(2)) - 1


def parse_year(token: str | int) -> int:
    m = _YEAR_RE.match(str(token))
    if m is None:
        raise ValueError(f"not a year token: {token!r}")
    return int(m.group(1))


def format_quarter(index: int) -> str:
    year, q = divmod(int(index), 4)
    return f"{year}-Q{q + 1}"


def quarter_of(year: int, quarter: int) -> int:
    if not 1 <= quarter <= 4:
        raise ValueError("quarter must be in 1..4")
    return year * 4 + quarter - 1


def shift_years(index: int, years: int) -> int:
    return index + 4 * years

"""Keyword-led line format shared by the reduction inputs.

Every non-blank line that does not start with `#` is a keyword followed by
integers, e.g. `A 1 2` or `edge 1 3 -4`.
"""

from typing import Iterator

from .._errors import InstanceFormatError
from ..instance import _ints

Record = tuple[int, str, list[int]]


def records(text: str | bytes, grammar: dict[str, tuple[int, int]]) -> Iterator[Record]:
    """(line number, keyword, integers) for every record.

    `grammar` maps each keyword to the (min, max) number of integers it takes;
    a max of -1 leaves it open.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        keyword, _, rest = stripped.partition(" ")
        if keyword not in grammar:
            raise InstanceFormatError(
                f"unknown keyword {keyword!r}, expected one of {sorted(grammar)}",
                lineno,
                line.index(keyword) + 1,
            )
        values = _ints(rest, lineno)
        lo, hi = grammar[keyword]
        if len(values) < lo or (hi >= 0 and len(values) > hi):
            wanted = f"{lo}" if lo == hi else f"{lo} to {'any' if hi < 0 else hi}"
            raise InstanceFormatError(
                f"{keyword!r} takes {wanted} integers, found {len(values)}", lineno
            )
        yield lineno, keyword, values

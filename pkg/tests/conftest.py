"""Shared hypothesis strategies for admissible measurement schedules."""

from __future__ import annotations

from hypothesis import strategies as st

from qcpd import Overlap, StrengthSchedule


def overlaps(min_value: float = 0.0, max_value: float = 0.9):
    return st.floats(
        min_value=min_value,
        max_value=max_value,
        allow_nan=False,
        allow_infinity=False,
    )


@st.composite
def schedules(draw, max_n: int = 8, max_c: float = 0.9):
    """Random admissible schedule (strengths capped at 3 for numeric room)."""
    n = draw(st.integers(min_value=2, max_value=max_n))
    c = draw(overlaps(max_value=max_c))
    lo = c if c > 0.0 else 0.05
    hi = min(1.0 / c, 3.0) if c > 0.0 else 3.0
    xs = tuple(
        draw(st.floats(min_value=lo, max_value=hi, allow_nan=False))
        for _ in range(n - 1)
    )
    return StrengthSchedule(n=n, strengths=xs, overlap=Overlap(c))

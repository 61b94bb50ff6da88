"""Number encoding for the JSON protocol configs.

Fractions are written as strings ("3/4") so exact presets survive a round
trip; floats stay JSON numbers.
"""

from __future__ import annotations

from fractions import Fraction


def encode_number(x):
    if isinstance(x, bool):
        return x
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x


def decode_number(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, dict) and set(x) == {"re", "im"}:
        return complex(x["re"], x["im"])
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    return x

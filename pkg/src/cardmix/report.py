"""Serialization helpers shared by the library and the CLI."""

from __future__ import annotations

import csv
import io
import json
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Sequence


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def approx_str(x: Fraction, digits: int = 12) -> str:
    """Decimal rendering with ``digits`` significant digits."""
    x = Fraction(x)
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(x.numerator) / Decimal(x.denominator)
    return format(d, "f") if d == d.to_integral_value() or abs(d) >= Decimal("1e-6") else str(d)


def exact_fields(x: Fraction) -> dict[str, str]:
    return {"exact": fraction_str(x), "approx": approx_str(x)}


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"

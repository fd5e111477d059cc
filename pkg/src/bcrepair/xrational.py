"""Exact rationals extended with a single +infinity value.

Capacities, storage amounts and bandwidth thresholds all live here so that
branch boundaries compare with exact equality and a division by zero in a
closed-form threshold reads as "unbounded" instead of raising.
"""

from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[int, Fraction, "ExtendedRational", str]


class ExtendedRational:
    """A rational number in lowest terms, or +inf.

    Infinity absorbs addition, dominates every comparison and is produced by
    dividing a non-negative value by zero.  Operations that have no sensible
    value (``inf - inf``, ``0 * inf``, negative / 0) raise ``ArithmeticError``.
    """

    __slots__ = ("_q",)

    def __init__(self, value: Number = 0, denominator: int | None = None):
        if isinstance(value, ExtendedRational):
            q = value._q
        elif isinstance(value, str):
            q = _parse(value)
        elif isinstance(value, float):
            raise TypeError("floats are not exact; pass a string or Fraction")
        else:
            q = Fraction(value)
        if denominator is not None:
            if q is None:
                raise ValueError("infinity takes no denominator")
            q = q / Fraction(denominator)
        self._q = q

    @classmethod
    def infinity(cls) -> "ExtendedRational":
        obj = cls.__new__(cls)
        obj._q = None
        return obj

    @property
    def is_infinite(self) -> bool:
        return self._q is None

    @property
    def is_finite(self) -> bool:
        return self._q is not None

    @property
    def numerator(self) -> int:
        self._require_finite()
        return self._q.numerator

    @property
    def denominator(self) -> int:
        self._require_finite()
        return self._q.denominator

    def as_fraction(self) -> Fraction:
        self._require_finite()
        return self._q

    def _require_finite(self):
        if self._q is None:
            raise ArithmeticError("value is infinite")

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self._q is None or other._q is None:
            return INF
        return ExtendedRational(self._q + other._q)

    __radd__ = __add__

    def __neg__(self):
        if self._q is None:
            raise ArithmeticError("-inf is not representable")
        return ExtendedRational(-self._q)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if other._q is None:
            raise ArithmeticError("subtracting infinity")
        if self._q is None:
            return INF
        return ExtendedRational(self._q - other._q)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self._q is None or other._q is None:
            finite = other._q if self._q is None else self._q
            if finite is None or finite > 0:
                return INF
            raise ArithmeticError("infinity times a non-positive value")
        return ExtendedRational(self._q * other._q)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if other._q is None:
            if self._q is None:
                raise ArithmeticError("inf / inf")
            return ExtendedRational(0)
        if other._q == 0:
            if self._q is not None and self._q < 0:
                raise ArithmeticError("negative value divided by zero")
            return INF
        if other._q < 0 and self._q is None:
            raise ArithmeticError("inf divided by a negative value")
        if self._q is None:
            return INF
        return ExtendedRational(self._q / other._q)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    # comparison -----------------------------------------------------------

    def _key(self):
        return (1, 0) if self._q is None else (0, self._q)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self._q == other._q

    def __hash__(self):
        return hash(("xr", self._q))

    def __lt__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self._key() < other._key()

    def __le__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self._key() <= other._key()

    def __gt__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self._key() > other._key()

    def __ge__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self._key() >= other._key()

    def __bool__(self):
        return self._q is None or self._q != 0

    # rendering ------------------------------------------------------------

    def __repr__(self):
        return f"ExtendedRational({str(self)!r})"

    def __str__(self):
        if self._q is None:
            return "inf"
        if self._q.denominator == 1:
            return str(self._q.numerator)
        return f"{self._q.numerator}/{self._q.denominator}"

    def to_decimal(self, digits: int = 12) -> str:
        """Decimal rendering with ``digits`` significant digits."""
        if self._q is None:
            return "inf"
        if self._q == 0:
            return "0"
        with localcontext() as ctx:
            ctx.prec = digits
            d = Decimal(self._q.numerator) / Decimal(self._q.denominator)
        return format(d, "g") if "E" not in format(d, "g") else format(d, "e")

    def __float__(self):
        return float("inf") if self._q is None else float(self._q)


def _parse(text: str) -> Fraction | None:
    text = text.strip()
    if text.lower() in ("inf", "+inf", "infinity", "∞"):
        return None
    # Fraction parses "3/8", "0.25" and "1e-3" exactly.
    return Fraction(text)


def _coerce(value) -> ExtendedRational:
    if isinstance(value, ExtendedRational):
        return value
    if isinstance(value, (int, Rational)):
        return ExtendedRational(Fraction(value))
    return NotImplemented


def xr(value: Number, denominator: int | None = None) -> ExtendedRational:
    """Shorthand constructor."""
    return ExtendedRational(value, denominator)


def xmin(*values) -> ExtendedRational:
    return min(_coerce(v) for v in values)


INF = ExtendedRational.infinity()
ZERO = ExtendedRational(0)
ONE = ExtendedRational(1)

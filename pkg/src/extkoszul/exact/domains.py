"""Coefficient domains.

Elements are plain Python values that support the arithmetic operators:
``int`` for the integers, :class:`fractions.Fraction` for the rationals,
:class:`ModP` for prime fields and :class:`~extkoszul.exact.polynomial.Polynomial`
for polynomial rings.  A domain object knows how to build and recognise its
elements and whether it is a field.
"""

from fractions import Fraction
from functools import total_ordering


def _is_prime(p):
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class Domain:
    name = "?"
    is_field = False

    zero = 0
    one = 1

    def convert(self, value):
        raise NotImplementedError

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return type(self) is type(other) and self.name == other.name

    def __hash__(self):
        return hash(self.name)


class IntegerRing(Domain):
    name = "ZZ"

    def convert(self, value):
        if isinstance(value, bool):
            return int(value)
        if isinstance(value, int):
            return value
        if isinstance(value, Fraction) and value.denominator == 1:
            return value.numerator
        raise TypeError(f"cannot convert {value!r} to an integer")


class RationalField(Domain):
    name = "QQ"
    is_field = True
    zero = Fraction(0)
    one = Fraction(1)

    def convert(self, value):
        if isinstance(value, (int, Fraction)):
            return Fraction(value)
        raise TypeError(f"cannot convert {value!r} to a rational")

    def inverse(self, value):
        if value == 0:
            raise ZeroDivisionError("zero has no inverse")
        return 1 / Fraction(value)


@total_ordering
class ModP:
    """Residue class modulo a prime, stored as its representative in [0, p)."""

    __slots__ = ("value", "p")

    def __init__(self, value, p):
        self.value = value % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, ModP):
            if other.p != self.p:
                raise ValueError("mixed characteristics")
            return other.value
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.value * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return ModP(-self.value, self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError("division by zero in a prime field")
        return ModP(self.value * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        return ModP(other, self.p) / self

    def __pow__(self, k):
        return ModP(pow(self.value, k, self.p), self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return (self.value - o) % self.p == 0

    def __lt__(self, other):
        return self.value < self._coerce(other)

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} mod {self.p}"

    def __str__(self):
        return str(self.value)


class PrimeField(Domain):
    is_field = True

    def __init__(self, p):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.name = f"GF({p})"
        self.zero = ModP(0, p)
        self.one = ModP(1, p)

    def convert(self, value):
        if isinstance(value, ModP):
            if value.p != self.p:
                raise ValueError("mixed characteristics")
            return value
        if isinstance(value, int):
            return ModP(value, self.p)
        if isinstance(value, Fraction):
            return ModP(value.numerator * pow(value.denominator, -1, self.p), self.p)
        raise TypeError(f"cannot convert {value!r} to {self.name}")

    def inverse(self, value):
        return self.one / value


ZZ = IntegerRing()
QQ = RationalField()


def GF(p):
    return PrimeField(p)


def is_zero(value):
    return value == 0

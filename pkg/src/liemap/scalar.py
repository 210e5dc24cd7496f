"""Exact field arithmetic: arbitrary-precision rationals and prime fields F_p.

Scalars are either ``fractions.Fraction`` (over Q) or :class:`FpElement`
(canonical residue in [0, p)).  Both support +, -, *, /, ** and compare
equal by value, so all higher modules are generic over the field.
No floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction


class FieldSpecError(ValueError):
    """Malformed or invalid field specification (e.g. non-prime modulus)."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class FpElement:
    """Residue modulo a prime p, always stored in canonical form [0, p).

    Mixed arithmetic with plain ints is allowed (ints reduce mod p), which
    keeps structure-constant code readable.
    """

    __slots__ = ("val", "p")

    def __init__(self, val: int, p: int):
        self.val = val % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, FpElement):
            if other.p != self.p:
                raise ValueError("mixed moduli: %d vs %d" % (self.p, other.p))
            return other.val
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            if other.denominator == 1:
                return other.numerator % self.p
            return (other.numerator * pow(other.denominator, -1, self.p)) % self.p
        return None

    def __add__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FpElement(self.val + v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FpElement(self.val - v, self.p)

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FpElement(v - self.val, self.p)

    def __mul__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FpElement(self.val * v, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        if v % self.p == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return FpElement(self.val * pow(v, -1, self.p), self.p)

    def __rtruediv__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        if self.val == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return FpElement(v * pow(self.val, -1, self.p), self.p)

    def __pow__(self, k: int):
        if k < 0 and self.val == 0:
            raise ZeroDivisionError("inverse of zero in F_%d" % self.p)
        return FpElement(pow(self.val, k, self.p), self.p)

    def __neg__(self):
        return FpElement(-self.val, self.p)

    def __eq__(self, other):
        if isinstance(other, FpElement):
            return self.p == other.p and self.val == other.val
        if isinstance(other, (int, Fraction)):
            v = self._coerce(other)
            return v == self.val
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.val))

    def __bool__(self):
        return self.val != 0

    def __repr__(self):
        return "FpElement(%d, p=%d)" % (self.val, self.p)

    def __str__(self):
        return str(self.val)


class Rationals:
    """Field descriptor for Q."""

    kind = "rationals"
    characteristic = 0
    modulus = None

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n: int):
        return Fraction(n)

    def from_rational(self, q: Fraction):
        return Fraction(q)

    def parse_scalar(self, text: str):
        return Fraction(text.strip())

    def format_scalar(self, x) -> str:
        x = Fraction(x)
        if x.denominator == 1:
            return str(x.numerator)
        return "%d/%d" % (x.numerator, x.denominator)

    def elements(self):
        raise FieldSpecError("Q is infinite; cannot enumerate")

    @property
    def size(self):
        return None

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Rationals()"

    def __str__(self):
        return "Q"


class PrimeField:
    """Field descriptor for F_p, p prime."""

    kind = "prime"

    def __init__(self, p: int):
        if not isinstance(p, int) or not is_prime(p):
            raise FieldSpecError("modulus %r is not prime" % (p,))
        self.modulus = p
        self.characteristic = p

    def zero(self):
        return FpElement(0, self.modulus)

    def one(self):
        return FpElement(1, self.modulus)

    def from_int(self, n: int):
        return FpElement(n, self.modulus)

    def from_rational(self, q: Fraction):
        if q.denominator % self.modulus == 0:
            raise ZeroDivisionError(
                "denominator %d not invertible mod %d" % (q.denominator, self.modulus))
        return FpElement(q.numerator * pow(q.denominator, -1, self.modulus), self.modulus)

    def parse_scalar(self, text: str):
        return FpElement(int(text.strip()), self.modulus)

    def format_scalar(self, x) -> str:
        if isinstance(x, int):
            x = self.from_int(x)
        return str(x.val)

    def elements(self):
        p = self.modulus
        return [FpElement(v, p) for v in range(p)]

    @property
    def size(self):
        return self.modulus

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("Fp", self.modulus))

    def __repr__(self):
        return "PrimeField(%d)" % self.modulus

    def __str__(self):
        return "F%d" % self.modulus


def make_field(spec: str):
    """Build a field descriptor from text: "Q", "F5", or "Fp:5"."""
    s = spec.strip()
    if s in ("Q", "q"):
        return Rationals()
    if s.lower().startswith("fp:"):
        body = s[3:]
    elif s[:1] in ("F", "f"):
        body = s[1:]
    else:
        raise FieldSpecError("unparseable field spec %r" % spec)
    try:
        p = int(body)
    except ValueError:
        raise FieldSpecError("unparseable field spec %r" % spec) from None
    return PrimeField(p)


def invert(x):
    """Multiplicative inverse of a nonzero scalar."""
    if isinstance(x, FpElement):
        if x.val == 0:
            raise ZeroDivisionError("inverse of zero")
        return x ** (-1)
    x = Fraction(x)
    if x == 0:
        raise ZeroDivisionError("inverse of zero")
    return 1 / x

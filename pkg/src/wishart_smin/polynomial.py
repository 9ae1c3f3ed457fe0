"""Dense univariate polynomials with exact rational coefficients.

Coefficients are stored as a tuple of integer numerators (``gmpy2.mpz``)
over one shared positive denominator.  Every operation is exact; floats
only appear in :meth:`RationalPolynomial.evaluate_float`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import gcd, mpq, mpz

__all__ = ["RationalPolynomial", "to_fraction"]


def to_fraction(value) -> Fraction:
    """Convert int / Fraction / mpz / mpq / decimal string to ``Fraction``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, type(mpz(0))):
        return Fraction(int(value))
    if isinstance(value, type(mpq(0))):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        q = mpq(value)
        return Fraction(int(q.numerator), int(q.denominator))
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def _trim(nums: list) -> list:
    while nums and nums[-1] == 0:
        nums.pop()
    return nums


class RationalPolynomial:
    """Polynomial ``sum_k (nums[k] / den) x**k`` with exact arithmetic.

    Instances are immutable and normalised: no trailing zero numerators,
    ``den > 0`` and ``gcd(content, den) == 1``.  The zero polynomial has an
    empty numerator tuple and degree ``-1``.
    """

    __slots__ = ("_nums", "_den")

    def __init__(self, coefficients: Iterable = ()):
        fracs = [to_fraction(c) for c in coefficients]
        den = 1
        for f in fracs:
            den = den * f.denominator // gcd(den, f.denominator)
        nums = [mpz(f.numerator) * (den // f.denominator) for f in fracs]
        self._nums, self._den = self._normalise(nums, mpz(den))

    @classmethod
    def from_integers(cls, numerators: Sequence, denominator=1) -> "RationalPolynomial":
        """Build from integer numerators over a common denominator."""
        obj = cls.__new__(cls)
        den = mpz(denominator)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        nums = [mpz(v) for v in numerators]
        if den < 0:
            den = -den
            nums = [-v for v in nums]
        obj._nums, obj._den = cls._normalise(nums, den)
        return obj

    @staticmethod
    def _normalise(nums: list, den):
        nums = _trim(list(nums))
        if not nums:
            return (), mpz(1)
        g = den
        for v in nums:
            if g == 1:
                break
            g = gcd(g, v)
        if g != 1:
            nums = [v // g for v in nums]
            den = den // g
        return tuple(nums), den

    # -- inspection -------------------------------------------------------
    @property
    def numerators(self) -> tuple:
        return self._nums

    @property
    def denominator(self):
        return self._den

    @property
    def coefficients(self) -> list[Fraction]:
        d = int(self._den)
        return [Fraction(int(v), d) for v in self._nums]

    @property
    def degree(self) -> int:
        return len(self._nums) - 1

    def is_zero(self) -> bool:
        return not self._nums

    def coefficient(self, k: int) -> Fraction:
        if 0 <= k < len(self._nums):
            return Fraction(int(self._nums[k]), int(self._den))
        return Fraction(0)

    def __len__(self) -> int:
        return len(self._nums)

    def __repr__(self) -> str:
        if len(self._nums) > 8:
            return f"RationalPolynomial(degree={self.degree})"
        return f"RationalPolynomial({[str(c) for c in self.coefficients]})"

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RationalPolynomial([other])
        if not isinstance(other, RationalPolynomial):
            return NotImplemented
        return self._nums == other._nums and self._den == other._den

    def __hash__(self) -> int:
        return hash((self._nums, self._den))

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "RationalPolynomial":
        if isinstance(other, RationalPolynomial):
            return other
        return RationalPolynomial([other])

    def __add__(self, other):
        other = self._coerce(other)
        den = self._den * other._den // gcd(self._den, other._den)
        a, b = den // self._den, den // other._den
        size = max(len(self._nums), len(other._nums))
        nums = [mpz(0)] * size
        for k, v in enumerate(self._nums):
            nums[k] += a * v
        for k, v in enumerate(other._nums):
            nums[k] += b * v
        return RationalPolynomial.from_integers(nums, den)

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial.from_integers([-v for v in self._nums], self._den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, RationalPolynomial):
            f = to_fraction(other)
            return RationalPolynomial.from_integers(
                [v * f.numerator for v in self._nums], self._den * f.denominator
            )
        if self.is_zero() or other.is_zero():
            return RationalPolynomial()
        nums = [mpz(0)] * (len(self._nums) + len(other._nums) - 1)
        for i, a in enumerate(self._nums):
            if a == 0:
                continue
            for j, b in enumerate(other._nums):
                nums[i + j] += a * b
        return RationalPolynomial.from_integers(nums, self._den * other._den)

    __rmul__ = __mul__

    def __pow__(self, power: int):
        if power < 0:
            raise ValueError("negative power")
        result = RationalPolynomial([1])
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def derivative(self) -> "RationalPolynomial":
        return RationalPolynomial.from_integers(
            [k * v for k, v in enumerate(self._nums)][1:], self._den
        )

    def shift(self, k: int) -> "RationalPolynomial":
        """Multiply by ``x**k``."""
        if self.is_zero():
            return self
        return RationalPolynomial.from_integers([mpz(0)] * k + list(self._nums), self._den)

    # -- evaluation -------------------------------------------------------
    def __call__(self, x) -> Fraction:
        x = to_fraction(x)
        acc = Fraction(0)
        for v in reversed(self._nums):
            acc = acc * x + int(v)
        return acc / int(self._den)

    def evaluate_float(self, x):
        """Horner evaluation in double precision (scalar or numpy array)."""
        coeffs = [float(mpq(v, self._den)) for v in self._nums]
        acc = 0.0 * x
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

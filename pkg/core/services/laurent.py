from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Mapping, Union

Scalar = Union[int, Fraction]


class QDomainError(ValueError):
    """Raised when a numeric q falls outside the open interval (0, 1)."""


def check_q(q_value: float) -> float:
    q_value = float(q_value)
    if not (0.0 < q_value < 1.0):
        raise QDomainError(f"q must lie in (0, 1); got {q_value!r}")
    return q_value


class LaurentCoefficient:
    """
    Laurent polynomial in q with exact rational coefficients.

    Instances are immutable and never store zero coefficients, so equality is
    plain dict equality.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Scalar] | None = None):
        cleaned: dict[int, Fraction] = {}
        for power, value in (terms or {}).items():
            value = Fraction(value)
            if value:
                cleaned[int(power)] = value
        self._terms = cleaned
        self._hash: int | None = None

    @classmethod
    def constant(cls, value: Scalar) -> "LaurentCoefficient":
        return cls({0: value})

    @classmethod
    def q_power(cls, power: int, value: Scalar = 1) -> "LaurentCoefficient":
        return cls({power: value})

    @staticmethod
    def _coerce(other) -> "LaurentCoefficient | None":
        if isinstance(other, LaurentCoefficient):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentCoefficient.constant(other)
        return None

    def terms(self) -> Iterator[tuple[int, Fraction]]:
        return iter(sorted(self._terms.items()))

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        merged = dict(self._terms)
        for power, value in other._terms.items():
            merged[power] = merged.get(power, 0) + value
        return LaurentCoefficient(merged)

    __radd__ = __add__

    def __neg__(self) -> "LaurentCoefficient":
        return LaurentCoefficient({p: -v for p, v in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        product: dict[int, Fraction] = {}
        for p1, v1 in self._terms.items():
            for p2, v2 in other._terms.items():
                product[p1 + p2] = product.get(p1 + p2, 0) + v1 * v2
        return LaurentCoefficient(product)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentCoefficient":
        if not self.is_monomial():
            raise ZeroDivisionError(f"{self} is not invertible in the Laurent ring")
        (power, value), = self._terms.items()
        return LaurentCoefficient({-power: 1 / value})

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, exponent: int) -> "LaurentCoefficient":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = ONE
        for _ in range(exponent):
            result = result * self
        return result

    def conjugate(self) -> "LaurentCoefficient":
        # q is real and the coefficients are rational.
        return self

    def evaluate(self, q_value: float) -> float:
        q_value = check_q(q_value)
        return math.fsum(float(value) * q_value ** power for power, value in self._terms.items())

    def __repr__(self) -> str:
        return f"LaurentCoefficient({dict(sorted(self._terms.items()))!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces: list[str] = []
        for index, (power, value) in enumerate(self.terms()):
            if index == 0:
                pieces.append(_format_term(power, value))
            elif value < 0:
                pieces.append(f" - {_format_term(power, -value)}")
            else:
                pieces.append(f" + {_format_term(power, value)}")
        return "".join(pieces)


def _format_term(power: int, value: Fraction) -> str:
    if power == 0:
        return str(value)
    base = "q" if power == 1 else f"q^{power}"
    if value == 1:
        return base
    if value == -1:
        return f"-{base}"
    return f"{value}*{base}"


ZERO = LaurentCoefficient()
ONE = LaurentCoefficient.constant(1)
Q = LaurentCoefficient.q_power(1)

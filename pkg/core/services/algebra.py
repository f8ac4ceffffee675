"""
Exact model of the q-deformed *-algebra on 2x2 matrices.

Elements are kept in normal form: every unstarred letter to the left of every
starred letter, each block sorted as z11 < z21 < z12 < z22.  The rewrite table
is oriented once from the sixteen defining relations and their adjoints and
then reused by every reduction.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from itertools import product
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from django.conf import settings

from .laurent import ONE, Q, ZERO, LaurentCoefficient, Scalar, check_q

logger = logging.getLogger(__name__)

GENERATORS = ("z11", "z21", "z12", "z22")


class WordParseError(ValueError):
    def __init__(self, token: str, position: int):
        self.token = token
        self.position = position
        super().__init__(f"unknown token {token!r} at token {position}")


class RewritingBudgetExceeded(RuntimeError):
    pass


class Strategy(str, Enum):
    LEFTMOST = "leftmost"
    RIGHTMOST = "rightmost"


class Letter(Enum):
    Z11 = ("z11", False)
    Z21 = ("z21", False)
    Z12 = ("z12", False)
    Z22 = ("z22", False)
    Z11_STAR = ("z11", True)
    Z21_STAR = ("z21", True)
    Z12_STAR = ("z12", True)
    Z22_STAR = ("z22", True)

    @property
    def generator(self) -> str:
        return self.value[0]

    @property
    def starred(self) -> bool:
        return self.value[1]

    @property
    def rank(self) -> int:
        return _RANK[self]

    def adjoint(self) -> "Letter":
        return Letter((self.generator, not self.starred))

    def __str__(self) -> str:
        return f"{self.generator}*" if self.starred else self.generator


# Definition order above is the normal order.
_RANK = {letter: index for index, letter in enumerate(Letter)}
_BY_RANK = tuple(Letter)
_TOKENS = {str(letter): letter for letter in Letter}

Word = tuple  # tuple[Letter, ...]
Term = tuple  # tuple[LaurentCoefficient, Word]


def parse_word(text: str) -> Word:
    letters = []
    for position, token in enumerate((text or "").split(), start=1):
        letter = _TOKENS.get(token)
        if letter is None:
            raise WordParseError(token, position)
        letters.append(letter)
    return tuple(letters)


def format_word(word: Iterable[Letter]) -> str:
    return " ".join(str(letter) for letter in word)


def adjoint_word(word: Word) -> Word:
    return tuple(letter.adjoint() for letter in reversed(word))


def star_inversions(word: Word) -> int:
    starred_seen = 0
    inversions = 0
    for letter in word:
        if letter.starred:
            starred_seen += 1
        else:
            inversions += starred_seen
    return inversions


def is_normal(word: Word) -> bool:
    return all(left.rank <= right.rank for left, right in zip(word, word[1:]))


def _order_key(word: Word) -> tuple:
    # Every rewrite rule strictly decreases this key, also inside a context.
    return (len(word), star_inversions(word), tuple(letter.rank for letter in word))


def _heap_key(word: Word) -> tuple:
    return (-len(word), -star_inversions(word), tuple(-letter.rank for letter in word))


def _word_from_heap_key(key: tuple) -> Word:
    return tuple(_BY_RANK[-rank] for rank in key[2])


@dataclass(frozen=True)
class NormalMonomial:
    unstarred: tuple[int, int, int, int] = (0, 0, 0, 0)
    starred: tuple[int, int, int, int] = (0, 0, 0, 0)

    def __post_init__(self):
        for block in (self.unstarred, self.starred):
            if len(block) != 4 or any(exponent < 0 for exponent in block):
                raise ValueError(f"invalid exponent block {block!r}")

    @classmethod
    def from_word(cls, word: Word) -> "NormalMonomial":
        if not is_normal(word):
            raise ValueError(f"word {format_word(word)!r} is not in normal order")
        counts = [0] * 8
        for letter in word:
            counts[letter.rank] += 1
        return cls(tuple(counts[:4]), tuple(counts[4:]))

    @cached_property
    def word(self) -> Word:
        exponents = self.unstarred + self.starred
        return tuple(letter for letter, count in zip(_BY_RANK, exponents) for _ in range(count))

    @property
    def degree(self) -> int:
        return sum(self.unstarred) + sum(self.starred)

    def sort_key(self) -> tuple:
        return (-self.degree, tuple(letter.rank for letter in self.word))

    def __str__(self) -> str:
        return format_word(self.word) or "1"


UNIT = NormalMonomial()


class NormalPolynomial:
    """Immutable map from normal monomials to nonzero Laurent coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[NormalMonomial, LaurentCoefficient | Scalar] | None = None):
        cleaned: dict[NormalMonomial, LaurentCoefficient] = {}
        for monomial, coefficient in (terms or {}).items():
            if not isinstance(coefficient, LaurentCoefficient):
                coefficient = LaurentCoefficient.constant(coefficient)
            if coefficient:
                cleaned[monomial] = coefficient
        self._terms = cleaned

    @classmethod
    def zero(cls) -> "NormalPolynomial":
        return cls()

    @classmethod
    def unit(cls) -> "NormalPolynomial":
        return cls({UNIT: ONE})

    @classmethod
    def letter(cls, letter: Letter) -> "NormalPolynomial":
        return cls({NormalMonomial.from_word((letter,)): ONE})

    @property
    def terms(self) -> Mapping[NormalMonomial, LaurentCoefficient]:
        return MappingProxyType(self._terms)

    def items(self) -> Iterator[tuple[NormalMonomial, LaurentCoefficient]]:
        return iter(sorted(self._terms.items(), key=lambda item: item[0].sort_key()))

    def coefficient(self, monomial: NormalMonomial) -> LaurentCoefficient:
        return self._terms.get(monomial, ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NormalPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "NormalPolynomial") -> "NormalPolynomial":
        if not isinstance(other, NormalPolynomial):
            return NotImplemented
        merged = dict(self._terms)
        for monomial, coefficient in other._terms.items():
            merged[monomial] = merged.get(monomial, ZERO) + coefficient
        return NormalPolynomial(merged)

    def __neg__(self) -> "NormalPolynomial":
        return NormalPolynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "NormalPolynomial") -> "NormalPolynomial":
        if not isinstance(other, NormalPolynomial):
            return NotImplemented
        return self + (-other)

    def scale(self, factor: LaurentCoefficient | Scalar) -> "NormalPolynomial":
        return NormalPolynomial({m: c * factor for m, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, NormalPolynomial):
            return multiply(self, other)
        if isinstance(other, (LaurentCoefficient, int)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (LaurentCoefficient, int)):
            return self.scale(other)
        return NotImplemented

    def __repr__(self) -> str:
        return f"NormalPolynomial({str(self)!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for index, (monomial, coefficient) in enumerate(self.items()):
            negative = coefficient.is_monomial() and next(coefficient.terms())[1] < 0
            if negative:
                coefficient = -coefficient
            if coefficient == ONE:
                body = str(monomial)
            elif coefficient.is_monomial():
                body = f"{coefficient} * {monomial}"
            else:
                body = f"({coefficient}) * {monomial}"
            if index == 0:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f" - {body}" if negative else f" + {body}")
        return "".join(pieces)


def _terms(*pairs: tuple[LaurentCoefficient | Scalar, str]) -> tuple[Term, ...]:
    return tuple(
        (c if isinstance(c, LaurentCoefficient) else LaurentCoefficient.constant(c), parse_word(text))
        for c, text in pairs
    )


@dataclass(frozen=True)
class Relation:
    """An identity lhs = rhs between combinations of words of the free algebra."""

    identifier: str
    label: str
    lhs: tuple[Term, ...]
    rhs: tuple[Term, ...]

    def difference(self) -> dict[Word, LaurentCoefficient]:
        merged: dict[Word, LaurentCoefficient] = {}
        for sign, side in ((1, self.lhs), (-1, self.rhs)):
            for coefficient, word in side:
                merged[word] = merged.get(word, ZERO) + coefficient * sign
        return {word: c for word, c in merged.items() if c}

    def adjoint(self) -> "Relation":
        def flip(side):
            return tuple((c.conjugate(), adjoint_word(word)) for c, word in side)

        return Relation(f"{self.identifier}*", f"({self.label})*", flip(self.lhs), flip(self.rhs))

    def reduce(self, strategy: Strategy = Strategy.LEFTMOST) -> NormalPolynomial:
        return reduce_terms(((c, w) for w, c in self.difference().items()), strategy=strategy)


_Q2 = Q ** 2
_GAP = ONE - _Q2  # 1 - q^2
_QQ = Q - Q ** -1  # q - q^-1


@lru_cache(maxsize=None)
def defining_relations() -> tuple[Relation, ...]:
    return (
        Relation("1", "z11 z21 = q z21 z11", _terms((1, "z11 z21")), _terms((Q, "z21 z11"))),
        Relation("2", "z21 z12 = z12 z21", _terms((1, "z21 z12")), _terms((1, "z12 z21"))),
        Relation("3", "z11 z12 = q z12 z11", _terms((1, "z11 z12")), _terms((Q, "z12 z11"))),
        Relation("4", "z21 z22 = q z22 z21", _terms((1, "z21 z22")), _terms((Q, "z22 z21"))),
        Relation(
            "5",
            "z11 z22 - z22 z11 = (q - q^-1) z12 z21",
            _terms((1, "z11 z22"), (-1, "z22 z11")),
            _terms((_QQ, "z12 z21")),
        ),
        Relation("6", "z12 z22 = q z22 z12", _terms((1, "z12 z22")), _terms((Q, "z22 z12"))),
        Relation(
            "7",
            "z11* z11 = q^2 z11 z11* - (1 - q^2)(z21 z21* + z12 z12*) + q^-2 (1 - q^2)^2 z22 z22* + 1 - q^2",
            _terms((1, "z11* z11")),
            _terms(
                (_Q2, "z11 z11*"),
                (-_GAP, "z21 z21*"),
                (-_GAP, "z12 z12*"),
                (Q ** -2 * _GAP * _GAP, "z22 z22*"),
                (_GAP, ""),
            ),
        ),
        Relation(
            "8",
            "z21* z21 = q^2 z21 z21* - (1 - q^2) z22 z22* + 1 - q^2",
            _terms((1, "z21* z21")),
            _terms((_Q2, "z21 z21*"), (-_GAP, "z22 z22*"), (_GAP, "")),
        ),
        Relation(
            "9",
            "z12* z12 = q^2 z12 z12* - (1 - q^2) z22 z22* + 1 - q^2",
            _terms((1, "z12* z12")),
            _terms((_Q2, "z12 z12*"), (-_GAP, "z22 z22*"), (_GAP, "")),
        ),
        Relation(
            "10",
            "z22* z22 = q^2 z22 z22* + 1 - q^2",
            _terms((1, "z22* z22")),
            _terms((_Q2, "z22 z22*"), (_GAP, "")),
        ),
        Relation(
            "11",
            "z11* z21 - q z21 z11* = (q - q^-1) z22 z12*",
            _terms((1, "z11* z21"), (-Q, "z21 z11*")),
            _terms((_QQ, "z22 z12*")),
        ),
        Relation(
            "12",
            "z11* z12 - q z12 z11* = (q - q^-1) z22 z21*",
            _terms((1, "z11* z12"), (-Q, "z12 z11*")),
            _terms((_QQ, "z22 z21*")),
        ),
        Relation("13", "z11* z22 = z22 z11*", _terms((1, "z11* z22")), _terms((1, "z22 z11*"))),
        Relation("14", "z22* z21 = q z21 z22*", _terms((1, "z22* z21")), _terms((Q, "z21 z22*"))),
        Relation("15", "z22* z12 = q z12 z22*", _terms((1, "z22* z12")), _terms((Q, "z12 z22*"))),
        Relation("16", "z21* z12 = z12 z21*", _terms((1, "z21* z12")), _terms((1, "z12 z21*"))),
    )


@lru_cache(maxsize=None)
def cross_identities() -> tuple[Relation, ...]:
    """
    x x* z11 = z11 x x* - (-1)^(a+alpha) (q - q^-1) z21 z12 z22*, for x = z_a^alpha
    in {z21, z12, z22}.
    """
    identities = []
    for generator, (a, alpha) in (("z21", (2, 1)), ("z12", (1, 2)), ("z22", (2, 2))):
        sign = -1 if (a + alpha) % 2 else 1
        identities.append(
            Relation(
                f"cross-{a}{alpha}",
                f"{generator} {generator}* z11 = z11 {generator} {generator}* "
                f"{'-' if sign > 0 else '+'} (q - q^-1) z21 z12 z22*",
                _terms((1, f"{generator} {generator}* z11")),
                _terms((1, f"z11 {generator} {generator}*"), (-sign * _QQ, "z21 z12 z22*")),
            )
        )
    return tuple(identities)


@lru_cache(maxsize=None)
def rewrite_rules() -> Mapping[tuple[Letter, Letter], tuple[Term, ...]]:
    rules: dict[tuple[Letter, Letter], tuple[Term, ...]] = {}
    for relation in defining_relations():
        for oriented in (relation, relation.adjoint()):
            difference = oriented.difference()
            lead = max(difference, key=_order_key)
            if len(lead) != 2:
                raise RuntimeError(f"relation {oriented.identifier} does not lead with a letter pair")
            pair = (lead[0], lead[1])
            if pair in rules:
                continue
            lead_coefficient = difference[lead]
            rules[pair] = tuple(
                (-(coefficient / lead_coefficient), word)
                for word, coefficient in sorted(difference.items(), key=lambda item: _order_key(item[0]))
                if word != lead
            )

    missing = [
        (left, right)
        for left, right in product(Letter, repeat=2)
        if left.rank > right.rank and (left, right) not in rules
    ]
    if missing:
        raise RuntimeError(f"no rewrite rule for {missing}")
    return MappingProxyType(rules)


def _find_redex(word: Word, strategy: Strategy) -> int | None:
    positions = range(len(word) - 1)
    if strategy is Strategy.RIGHTMOST:
        positions = reversed(positions)
    for position in positions:
        if word[position].rank > word[position + 1].rank:
            return position
    return None


def reduce_terms(
    terms: Iterable[Term],
    strategy: Strategy = Strategy.LEFTMOST,
    step_budget: int | None = None,
) -> NormalPolynomial:
    """
    Reduce a linear combination of words to normal form.

    Words are processed largest first in the rewriting order.  Rewriting only
    produces smaller words, so each word is expanded once and equal words
    produced along different paths are merged before expansion.
    """
    strategy = Strategy(strategy)
    if step_budget is None:
        step_budget = getattr(settings, "QMB_REWRITE_STEP_BUDGET", 500_000)
    rules = rewrite_rules()

    pending: dict[Word, LaurentCoefficient] = {}
    heap: list[tuple] = []

    def push(word: Word, coefficient: LaurentCoefficient) -> None:
        if word in pending:
            pending[word] = pending[word] + coefficient
            return
        pending[word] = coefficient
        heapq.heappush(heap, _heap_key(word))

    for coefficient, word in terms:
        push(tuple(word), coefficient)

    result: dict[NormalMonomial, LaurentCoefficient] = {}
    steps = 0
    while heap:
        word = _word_from_heap_key(heapq.heappop(heap))
        coefficient = pending.pop(word)
        if not coefficient:
            continue
        position = _find_redex(word, strategy)
        if position is None:
            monomial = NormalMonomial.from_word(word)
            result[monomial] = result.get(monomial, ZERO) + coefficient
            continue
        steps += 1
        if steps > step_budget:
            raise RewritingBudgetExceeded(
                f"reduction exceeded {step_budget} rewrite steps at {format_word(word)!r}"
            )
        prefix, suffix = word[:position], word[position + 2:]
        for rule_coefficient, replacement in rules[(word[position], word[position + 1])]:
            push(prefix + replacement + suffix, coefficient * rule_coefficient)

    logger.debug("Reduced to %d monomials in %d steps (%s).", len(result), steps, strategy.value)
    return NormalPolynomial(result)


def normal_form(
    word: Word | str,
    strategy: Strategy = Strategy.LEFTMOST,
    step_budget: int | None = None,
) -> NormalPolynomial:
    if isinstance(word, str):
        word = parse_word(word)
    return reduce_terms([(ONE, tuple(word))], strategy=strategy, step_budget=step_budget)


def multiply(p1: NormalPolynomial, p2: NormalPolynomial) -> NormalPolynomial:
    return reduce_terms(
        (c1 * c2, m1.word + m2.word)
        for m1, c1 in p1.terms.items()
        for m2, c2 in p2.terms.items()
    )


def star(p: NormalPolynomial) -> NormalPolynomial:
    return reduce_terms((c.conjugate(), adjoint_word(m.word)) for m, c in p.terms.items())


def evaluate_coefficients(p: NormalPolynomial, q_value: float) -> dict[NormalMonomial, float]:
    q_value = check_q(q_value)
    return {monomial: coefficient.evaluate(q_value) for monomial, coefficient in p.items()}

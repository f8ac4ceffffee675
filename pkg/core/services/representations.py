"""
Truncated weighted-shift realizations of the irreducible representation series.

Every generator acts on a multi-indexed basis as a sum of at most two weighted
shifts.  A series is described by its shift terms; the builder evaluates the
weights over the whole lattice with numpy and drops transitions that leave the
box [0, N)^d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import product
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .algebra import GENERATORS, Letter, NormalPolynomial, Word
from .laurent import check_q

SparseOperator = sp.csr_matrix


class SeriesSpecError(ValueError):
    pass


class SeriesTag(str, Enum):
    ONE_DIM = "one-dim"
    PI = "pi"
    RHO12 = "rho12"
    RHO1 = "rho1"
    RHO2 = "rho2"
    HAT_RHO = "hat-rho"
    RHO_FULL = "rho-full"

    @property
    def arity(self) -> int:
        return _ARITY[self]

    @property
    def axes(self) -> tuple[str, ...]:
        return _AXES[self]

    @property
    def rank(self) -> int:
        return len(self.axes)


_ARITY = {
    SeriesTag.ONE_DIM: 2,
    SeriesTag.PI: 1,
    SeriesTag.RHO12: 2,
    SeriesTag.RHO1: 1,
    SeriesTag.RHO2: 1,
    SeriesTag.HAT_RHO: 1,
    SeriesTag.RHO_FULL: 0,
}

_AXES = {
    SeriesTag.ONE_DIM: (),
    SeriesTag.PI: ("k",),
    SeriesTag.RHO12: ("k",),
    SeriesTag.RHO1: ("m", "k"),
    SeriesTag.RHO2: ("m", "k"),
    SeriesTag.HAT_RHO: ("m", "l", "k"),
    SeriesTag.RHO_FULL: ("s", "m", "l", "k"),
}


@dataclass(frozen=True)
class SeriesSpec:
    tag: SeriesTag
    phases: tuple[float, ...] = ()
    q_value: float = 0.5

    def __post_init__(self):
        try:
            tag = SeriesTag(self.tag)
        except ValueError:
            raise SeriesSpecError(f"unknown series {self.tag!r}") from None
        object.__setattr__(self, "tag", tag)
        phases = tuple(float(phi) for phi in self.phases)
        if len(phases) != tag.arity:
            raise SeriesSpecError(
                f"series {tag.value} takes {tag.arity} phase(s), got {len(phases)}"
            )
        for phi in phases:
            if not (0.0 <= phi < 2 * math.pi):
                raise SeriesSpecError(f"phase {phi!r} outside [0, 2pi)")
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "q_value", check_q(self.q_value))

    def as_dict(self) -> dict:
        return {"series": self.tag.value, "phases": list(self.phases), "q": self.q_value}


@dataclass(frozen=True)
class BasisLattice:
    axes: tuple[str, ...]
    cutoff: int

    @property
    def rank(self) -> int:
        return len(self.axes)

    @property
    def dimension(self) -> int:
        return self.cutoff ** self.rank

    @cached_property
    def coordinates(self) -> np.ndarray:
        """Multi-index of every basis vector, shape (dimension, rank), last axis fastest."""
        grid = np.array(list(product(range(self.cutoff), repeat=self.rank)), dtype=np.int64)
        return grid.reshape(self.dimension, self.rank)

    @cached_property
    def _strides(self) -> np.ndarray:
        return np.array([self.cutoff ** (self.rank - 1 - i) for i in range(self.rank)], dtype=np.int64)

    def index(self, multi_index: Sequence[int]) -> int:
        if len(multi_index) != self.rank or not all(0 <= i < self.cutoff for i in multi_index):
            raise IndexError(f"{tuple(multi_index)} outside the lattice")
        return int(np.dot(np.asarray(multi_index, dtype=np.int64), self._strides))

    def ravel(self, multi_indices: np.ndarray) -> np.ndarray:
        return multi_indices @ self._strides

    def multi_index(self, index: int) -> tuple[int, ...]:
        return tuple(int(i) for i in self.coordinates[index])

    def axis(self, name: str) -> np.ndarray:
        return self.coordinates[:, self.axes.index(name)]

    def interior(self, margin: int) -> np.ndarray:
        if self.rank == 0:
            return np.arange(1)
        inside = np.all(
            (self.coordinates >= margin) & (self.coordinates < self.cutoff - margin), axis=1
        )
        return np.flatnonzero(inside)

    def as_dict(self) -> dict:
        return {
            "rank": self.rank,
            "cutoff": self.cutoff,
            "dimension": self.dimension,
            "axes": list(self.axes),
        }


@dataclass(frozen=True)
class ShiftTerm:
    offset: tuple[int, ...]
    weight: Callable[[Mapping[str, np.ndarray]], np.ndarray | complex]


def _root(q: float, j: np.ndarray) -> np.ndarray:
    # sqrt(1 - q^(2j)); vanishes at j = 0
    return np.sqrt(1.0 - q ** (2 * j))


def _phase(phi: float) -> complex:
    return complex(np.exp(1j * phi))


def _one_dim_terms(q, phases):
    phi1, phi2 = phases
    return {
        "z11": [ShiftTerm((), lambda c: _phase(phi1) / q)],
        "z21": [],
        "z12": [],
        "z22": [ShiftTerm((), lambda c: _phase(phi2))],
    }


def _pi_terms(q, phases):
    (phi,) = phases
    return {
        "z11": [ShiftTerm((1,), lambda c: _root(q, c["k"] + 1) / q)],
        "z21": [],
        "z12": [],
        "z22": [ShiftTerm((0,), lambda c: _phase(phi))],
    }


def _rho12_terms(q, phases):
    phi1, phi2 = phases
    return {
        "z11": [ShiftTerm((-1,), lambda c: -_phase(phi1 + phi2) * _root(q, c["k"]) / q)],
        "z21": [ShiftTerm((0,), lambda c: _phase(phi1) * q ** c["k"])],
        "z12": [ShiftTerm((0,), lambda c: _phase(phi2) * q ** c["k"])],
        "z22": [ShiftTerm((1,), lambda c: _root(q, c["k"] + 1))],
    }


def _rho1_terms(q, phases):
    (phi,) = phases
    return {
        "z11": [
            ShiftTerm((1, -1), lambda c: -_phase(phi) * _root(q, c["m"] + 1) * _root(q, c["k"]) / q)
        ],
        "z21": [ShiftTerm((1, 0), lambda c: q ** c["k"] * _root(q, c["m"] + 1))],
        "z12": [ShiftTerm((0, 0), lambda c: _phase(phi) * q ** c["k"])],
        "z22": [ShiftTerm((0, 1), lambda c: _root(q, c["k"] + 1))],
    }


def _rho2_terms(q, phases):
    (phi,) = phases
    return {
        "z11": [
            ShiftTerm((1, -1), lambda c: -_phase(phi) * _root(q, c["m"] + 1) * _root(q, c["k"]) / q)
        ],
        "z21": [ShiftTerm((0, 0), lambda c: _phase(phi) * q ** c["k"])],
        "z12": [ShiftTerm((1, 0), lambda c: q ** c["k"] * _root(q, c["m"] + 1))],
        "z22": [ShiftTerm((0, 1), lambda c: _root(q, c["k"] + 1))],
    }


def _hat_rho_terms(q, phases):
    (phi,) = phases
    return {
        "z11": [
            ShiftTerm((0, 0, 0), lambda c: _phase(phi) * q ** (c["m"] + c["l"])),
            ShiftTerm(
                (1, 1, -1),
                lambda c: -_root(q, c["l"] + 1) * _root(q, c["m"] + 1) * _root(q, c["k"]) / q,
            ),
        ],
        "z21": [ShiftTerm((1, 0, 0), lambda c: q ** c["k"] * _root(q, c["m"] + 1))],
        "z12": [ShiftTerm((0, 1, 0), lambda c: q ** c["k"] * _root(q, c["l"] + 1))],
        "z22": [ShiftTerm((0, 0, 1), lambda c: _root(q, c["k"] + 1))],
    }


def _rho_full_terms(q, phases):
    return {
        "z11": [
            ShiftTerm((1, 0, 0, 0), lambda c: q ** (c["m"] + c["l"]) * _root(q, c["s"] + 1)),
            ShiftTerm(
                (0, 1, 1, -1),
                lambda c: -_root(q, c["l"] + 1) * _root(q, c["m"] + 1) * _root(q, c["k"]) / q,
            ),
        ],
        "z21": [ShiftTerm((0, 1, 0, 0), lambda c: q ** c["k"] * _root(q, c["m"] + 1))],
        "z12": [ShiftTerm((0, 0, 1, 0), lambda c: q ** c["k"] * _root(q, c["l"] + 1))],
        "z22": [ShiftTerm((0, 0, 0, 1), lambda c: _root(q, c["k"] + 1))],
    }


_SERIES_TERMS = {
    SeriesTag.ONE_DIM: _one_dim_terms,
    SeriesTag.PI: _pi_terms,
    SeriesTag.RHO12: _rho12_terms,
    SeriesTag.RHO1: _rho1_terms,
    SeriesTag.RHO2: _rho2_terms,
    SeriesTag.HAT_RHO: _hat_rho_terms,
    SeriesTag.RHO_FULL: _rho_full_terms,
}


@dataclass(frozen=True)
class TruncatedRep:
    spec: SeriesSpec
    lattice: BasisLattice
    operators: Mapping[str, sp.csr_matrix]
    adjoints: Mapping[str, sp.csr_matrix] = field(repr=False)

    @property
    def q_value(self) -> float:
        return self.spec.q_value

    @property
    def dimension(self) -> int:
        return self.lattice.dimension

    def matrix(self, letter: Letter) -> sp.csr_matrix:
        source = self.adjoints if letter.starred else self.operators
        return source[letter.generator]

    def identity(self) -> sp.csr_matrix:
        return sp.identity(self.dimension, dtype=complex, format="csr")

    def defect_diagonal(self) -> np.ndarray | None:
        """
        Diagonal of 1 - pi(z22 z22*), i.e. q^(2k) on the z22 axis.

        None for the series where pi(z22) is unitary.
        """
        if self.spec.tag in (SeriesTag.ONE_DIM, SeriesTag.PI):
            return None
        return self.q_value ** (2.0 * self.lattice.axis("k"))

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.as_dict(),
            "lattice": self.lattice.as_dict(),
            "operators": {name: to_triplets(self.operators[name]) for name in GENERATORS},
        }


def to_triplets(matrix: sp.spmatrix) -> list[list]:
    coo = matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    return [
        [int(coo.row[i]), int(coo.col[i]), float(coo.data[i].real), float(coo.data[i].imag)]
        for i in order
    ]


def _build_operator(lattice: BasisLattice, terms: Sequence[ShiftTerm]) -> sp.csr_matrix:
    dimension = lattice.dimension
    columns_all = np.arange(dimension)
    coords = {name: lattice.coordinates[:, axis] for axis, name in enumerate(lattice.axes)}
    rows, cols, data = [], [], []
    for term in terms:
        weights = np.broadcast_to(np.asarray(term.weight(coords), dtype=complex), (dimension,))
        targets = lattice.coordinates + np.asarray(term.offset, dtype=np.int64)
        inside = np.all((targets >= 0) & (targets < lattice.cutoff), axis=1) & (weights != 0)
        rows.append(lattice.ravel(targets[inside]))
        cols.append(columns_all[inside])
        data.append(weights[inside])
    if not rows:
        return sp.csr_matrix((dimension, dimension), dtype=complex)
    matrix = sp.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dimension, dimension),
        dtype=complex,
    )
    matrix.eliminate_zeros()
    return matrix


def build_representation(spec: SeriesSpec, cutoff: int) -> TruncatedRep:
    if cutoff < 1:
        raise SeriesSpecError(f"cutoff must be >= 1, got {cutoff}")
    lattice = BasisLattice(spec.tag.axes, cutoff)
    series_terms = _SERIES_TERMS[spec.tag](spec.q_value, spec.phases)
    operators = {
        name: _build_operator(lattice, series_terms[name]) for name in GENERATORS
    }
    adjoints = {name: matrix.conj().T.tocsr() for name, matrix in operators.items()}
    return TruncatedRep(spec=spec, lattice=lattice, operators=operators, adjoints=adjoints)


def represent_word(rep: TruncatedRep, word: Word) -> sp.csr_matrix:
    result = rep.identity()
    for letter in word:
        result = result @ rep.matrix(letter)
    return result.tocsr()


def represent_polynomial(rep: TruncatedRep, p: NormalPolynomial) -> sp.csr_matrix:
    result = sp.csr_matrix((rep.dimension, rep.dimension), dtype=complex)
    for monomial, coefficient in p.items():
        result = result + coefficient.evaluate(rep.q_value) * represent_word(rep, monomial.word)
    return result.tocsr()


def diagonal_part_z11(rep: TruncatedRep) -> sp.csr_matrix:
    """pi(z11) minus its off-diagonal part -q pi(z21) pi(z12) pi(z22)* (1 - pi(z22 z22*))^-1."""
    z11 = rep.operators["z11"]
    correction = off_diagonal_z11(rep)
    if correction is None:
        return z11.copy()
    return (z11 - correction).tocsr()


def off_diagonal_z11(rep: TruncatedRep) -> sp.csr_matrix | None:
    defect = rep.defect_diagonal()
    if defect is None:
        return None
    inverse = sp.diags(1.0 / defect, format="csr")
    return (
        -rep.q_value
        * rep.operators["z21"]
        @ rep.operators["z12"]
        @ rep.adjoints["z22"]
        @ inverse
    ).tocsr()

"""
Finite-truncation checks of the representation series.

Everything here works on interior basis vectors: a vector is interior when
every lattice coordinate lies in [margin, N - margin), so no word of at most
``margin`` letters can push it out of the box and truncation cannot leak into
a residual.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from django.conf import settings

from .algebra import (
    Letter,
    Relation,
    Term,
    Word,
    cross_identities,
    defining_relations,
    normal_form,
    parse_word,
)
from .dynsys import OrbitTag, orbit_membership, orbit_value
from .laurent import ONE, Q
from .representations import (
    SeriesSpec,
    SeriesTag,
    TruncatedRep,
    build_representation,
    diagonal_part_z11,
    off_diagonal_z11,
    represent_polynomial,
    represent_word,
)

logger = logging.getLogger(__name__)

MIN_MARGIN = 3
PHASE_GRID = (0.0, 2 * math.pi / 5, 4 * math.pi / 5, 6 * math.pi / 5, 8 * math.pi / 5, 1.0)
BRIDGE_WORDS = 100


class VerificationConfigError(ValueError):
    pass


class StructuralError(RuntimeError):
    pass


def _setting(name: str, default):
    return getattr(settings, name, default)


def _tolerance(tol: float | None) -> float:
    return _setting("QMB_RESIDUAL_TOLERANCE", 1e-10) if tol is None else tol


def _margin(margin: int | None) -> int:
    return _setting("QMB_DEFAULT_MARGIN", MIN_MARGIN) if margin is None else margin


def series_orbit_table() -> dict[SeriesTag, OrbitTag]:
    return {
        SeriesTag.ONE_DIM: OrbitTag.OMEGA_001,
        SeriesTag.PI: OrbitTag.OMEGA_001,
        SeriesTag.RHO12: OrbitTag.OMEGA_110,
        SeriesTag.RHO1: OrbitTag.OMEGA_010,
        SeriesTag.RHO2: OrbitTag.OMEGA_100,
        SeriesTag.HAT_RHO: OrbitTag.OMEGA_000,
        SeriesTag.RHO_FULL: OrbitTag.OMEGA_000,
    }


def default_cutoff(tag: SeriesTag, margin: int | None = None) -> int:
    tag = SeriesTag(tag)
    margin = _margin(margin)
    if tag.rank == 0:
        return 1
    cutoffs = _setting("QMB_DEFAULT_CUTOFFS", [20, 12, 8, 6])
    cutoff = int(cutoffs[tag.rank - 1])
    if cutoff <= 2 * margin:
        cutoff = 2 * margin + 1
    return cutoff


def check_cutoff(tag: SeriesTag, cutoff: int, margin: int) -> None:
    if margin < MIN_MARGIN:
        raise VerificationConfigError(f"margin must be >= {MIN_MARGIN}, got {margin}")
    if SeriesTag(tag).rank and cutoff <= 2 * margin:
        raise VerificationConfigError(
            f"cutoff {cutoff} leaves no interior vectors at margin {margin}"
        )


def interior_columns(rep: TruncatedRep, margin: int) -> np.ndarray:
    check_cutoff(rep.spec.tag, rep.lattice.cutoff, margin)
    return rep.lattice.interior(margin)


def basis_block(rep: TruncatedRep, columns: np.ndarray) -> sp.csr_matrix:
    return rep.identity()[:, columns].tocsr()


def apply_word(rep: TruncatedRep, word: Word, block: sp.spmatrix) -> sp.csr_matrix:
    for letter in reversed(word):
        block = rep.matrix(letter) @ block
    return sp.csr_matrix(block)


def apply_terms(rep: TruncatedRep, terms: Iterable[Term], block: sp.spmatrix) -> sp.csr_matrix:
    total = sp.csr_matrix(block.shape, dtype=complex)
    for coefficient, word in terms:
        total = total + coefficient.evaluate(rep.q_value) * apply_word(rep, word, block)
    return total


def column_norms(block: sp.spmatrix) -> np.ndarray:
    return np.sqrt(np.asarray(abs(block).power(2).sum(axis=0)).ravel())


def normalized_residual(lhs: sp.spmatrix, rhs: sp.spmatrix) -> float:
    """max over columns of |(lhs - rhs) v| / max(1, |lhs v|)."""
    if lhs.shape[1] == 0:
        return 0.0
    ratios = column_norms(lhs - rhs) / np.maximum(1.0, column_norms(lhs))
    return float(ratios.max())


@dataclass(frozen=True)
class ResidualReport:
    identifier: str
    label: str
    residual: float
    margin: int
    tolerance: float
    symbolic_zero: bool | None = None

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance

    def as_dict(self) -> dict:
        data = {
            "id": self.identifier,
            "label": self.label,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
        if self.symbolic_zero is not None:
            data["symbolicZero"] = self.symbolic_zero
        return data


def _unitary_z22_relation() -> Relation:
    # Relation 7 once z21 = z12 = 0 and z22 z22* = 1.
    q2 = Q ** 2
    return Relation(
        "pi-reduced",
        "z11* z11 = q^2 z11 z11* + (q^-2 - 1)",
        ((ONE, parse_word("z11* z11")),),
        ((q2, parse_word("z11 z11*")), (Q ** -2 - ONE, ())),
    )


def _relation_report(rep, relation: Relation, block, margin, tol, symbolic_zero=None) -> ResidualReport:
    residual = normalized_residual(
        apply_terms(rep, relation.lhs, block), apply_terms(rep, relation.rhs, block)
    )
    return ResidualReport(relation.identifier, relation.label, residual, margin, tol, symbolic_zero)


def relation_residuals(
    rep: TruncatedRep, margin: int | None = None, tol: float | None = None
) -> list[ResidualReport]:
    margin, tol = _margin(margin), _tolerance(tol)
    block = basis_block(rep, interior_columns(rep, margin))
    reports = [_relation_report(rep, relation, block, margin, tol) for relation in defining_relations()]
    if series_orbit_table()[rep.spec.tag] is OrbitTag.OMEGA_001:
        reports.append(_relation_report(rep, _unitary_z22_relation(), block, margin, tol))
    for report in reports:
        if not report.passed:
            logger.warning(
                "Relation %s fails on %s: residual=%.3e", report.identifier, rep.spec.tag.value, report.residual
            )
    return reports


def cross_identity_check(
    rep: TruncatedRep, margin: int | None = None, tol: float | None = None
) -> list[ResidualReport]:
    margin, tol = _margin(margin), _tolerance(tol)
    block = basis_block(rep, interior_columns(rep, margin))
    reports = []
    for identity in cross_identities():
        symbolic_zero = identity.reduce().is_zero()
        if not symbolic_zero:
            logger.warning("Identity %s does not reduce to zero under the defining relations.", identity.identifier)
        reports.append(_relation_report(rep, identity, block, margin, tol, symbolic_zero))
    return reports


def symbolic_numeric_bridge(
    rep: TruncatedRep,
    words: Sequence[Word],
    margin: int | None = None,
    tol: float | None = None,
) -> ResidualReport:
    """Worst residual between a word's matrix product and its normal form's matrix."""
    margin, tol = _margin(margin), _tolerance(tol)
    if any(len(word) > margin for word in words):
        raise VerificationConfigError("bridge words must not be longer than the margin")
    columns = interior_columns(rep, margin)
    worst = 0.0
    for word in words:
        direct = represent_word(rep, word)[:, columns]
        reduced = represent_polynomial(rep, normal_form(word))[:, columns]
        worst = max(worst, normalized_residual(direct, reduced))
    return ResidualReport("bridge", f"{len(words)} words", worst, margin, tol)


def random_words(count: int, max_length: int, seed: int = 0) -> list[Word]:
    rng = random.Random(seed)
    letters = list(Letter)
    return [
        tuple(rng.choice(letters) for _ in range(rng.randint(0, max_length)))
        for _ in range(count)
    ]


def commuting_family(rep: TruncatedRep) -> tuple[sp.csr_matrix, sp.csr_matrix, sp.csr_matrix]:
    """pi(z21 z21*), pi(z12 z12*), pi(z22 z22*)."""
    return tuple(
        (rep.operators[name] @ rep.adjoints[name]).tocsr() for name in ("z21", "z12", "z22")
    )


def _off_diagonal_mass(matrix: sp.spmatrix) -> float:
    rest = abs(matrix - sp.diags(matrix.diagonal()))
    mass = float(rest.max()) if rest.nnz else 0.0
    imaginary = np.abs(matrix.diagonal().imag)
    return max(mass, float(imaginary.max()) if imaginary.size else 0.0)


@dataclass(frozen=True)
class SpectrumPoint:
    index: tuple[int, ...]
    triple: tuple[float, float, float]
    exponents: tuple[int, int, int] | None
    error: float | None


@dataclass(frozen=True)
class SpectrumReport:
    series: SeriesTag
    orbit: OrbitTag
    points: tuple[SpectrumPoint, ...]
    off_diagonal: float
    tolerance: float

    @property
    def unmatched(self) -> int:
        return sum(1 for point in self.points if point.exponents is None)

    @property
    def max_error(self) -> float:
        errors = [point.error for point in self.points if point.error is not None]
        return max(errors) if errors else 0.0

    @property
    def matched(self) -> bool:
        return self.unmatched == 0 and self.max_error < self.tolerance

    def as_dict(self) -> dict:
        return {
            "orbit": self.orbit.label,
            "maxError": self.max_error,
            "offDiagonal": self.off_diagonal,
            "unmatched": self.unmatched,
            "matched": self.matched,
        }


def joint_spectrum(
    rep: TruncatedRep, tol: float | None = None, search_box: int | None = None
) -> SpectrumReport:
    tol = _tolerance(tol)
    family = commuting_family(rep)
    off_diagonal = max(_off_diagonal_mass(matrix) for matrix in family)
    if off_diagonal > _setting("QMB_STRUCTURE_TOLERANCE", 1e-14):
        raise StructuralError(
            f"commuting family of {rep.spec.tag.value} is not diagonal (mass {off_diagonal:.3e})"
        )
    triples = np.column_stack([matrix.diagonal().real for matrix in family])
    orbit = series_orbit_table()[rep.spec.tag]
    points = []
    for index, triple in enumerate(triples):
        triple = tuple(float(x) for x in triple)
        exponents = orbit_membership(triple, orbit, rep.q_value, tol, search_box)
        error = None
        if exponents is not None:
            value = orbit_value(orbit.base, exponents, rep.q_value)
            error = max(abs(a - b) for a, b in zip(value, triple))
        points.append(SpectrumPoint(rep.lattice.multi_index(index), triple, exponents, error))
    report = SpectrumReport(rep.spec.tag, orbit, tuple(points), off_diagonal, tol)
    if not report.matched:
        logger.warning(
            "Spectrum of %s does not match orbit %s (unmatched=%d).",
            rep.spec.tag.value,
            orbit.label,
            report.unmatched,
        )
    return report


def _block_compression(matrix: sp.spmatrix, labels: Sequence) -> sp.csr_matrix:
    """Keep the entries whose row and column carry the same joint-eigenspace label."""
    ids = {}
    label_ids = np.array([ids.setdefault(label, len(ids)) for label in labels])
    coo = matrix.tocoo()
    keep = label_ids[coo.row] == label_ids[coo.col]
    return sp.csr_matrix((coo.data[keep], (coo.row[keep], coo.col[keep])), shape=matrix.shape)


@dataclass(frozen=True)
class DecompositionReport:
    series: SeriesTag
    branch: str
    checks: tuple[ResidualReport, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def as_dict(self) -> dict:
        return {
            "branch": self.branch,
            "checks": [check.as_dict() for check in self.checks],
            "pass": self.passed,
        }


def diagonal_decomposition_check(
    rep: TruncatedRep,
    margin: int | None = None,
    tol: float | None = None,
    spectrum: SpectrumReport | None = None,
) -> DecompositionReport:
    margin, tol = _margin(margin), _tolerance(tol)
    block = basis_block(rep, interior_columns(rep, margin))
    spectrum = spectrum or joint_spectrum(rep, tol)
    q = rep.q_value
    z11 = rep.operators["z11"]
    a = diagonal_part_z11(rep)
    a_star = a.conj().T.tocsr()
    correction = off_diagonal_z11(rep)
    if correction is None:
        correction = sp.csr_matrix(z11.shape, dtype=complex)

    labels = [
        point.exponents if point.exponents is not None else ("unresolved", index)
        for index, point in enumerate(spectrum.points)
    ]
    compressed = _block_compression(z11, labels)
    checks = [
        ResidualReport(
            "split",
            "pi(z11) = block part + closed-form correction",
            normalized_residual(z11 @ block, (compressed + correction) @ block),
            margin,
            tol,
        )
    ]

    identity = rep.identity()
    orbit = series_orbit_table()[rep.spec.tag]
    if orbit is OrbitTag.OMEGA_001:
        branch = "unitary-z22"
        rhs = q ** 2 * (a @ a_star) + (q ** -2 - 1.0) * identity
        checks.append(
            ResidualReport(
                "reduced",
                "a* a = q^2 a a* + (q^-2 - 1)",
                normalized_residual(a_star @ a @ block, rhs @ block),
                margin,
                tol,
            )
        )
    elif orbit is OrbitTag.OMEGA_000:
        branch = "oscillator"
        weights = sp.diags(q ** (2.0 * (rep.lattice.axis("m") + rep.lattice.axis("l"))))
        rhs = q ** 2 * (a @ a_star) + (1.0 - q ** 2) * weights
        checks.append(
            ResidualReport(
                "block-identity",
                "a* a = q^2 a a* + (1 - q^2) q^(2(m+l))",
                normalized_residual(a_star @ a @ block, rhs @ block),
                margin,
                tol,
            )
        )
    else:
        branch = "vanishing"
        part = a @ block
        checks.append(
            ResidualReport(
                "zero",
                "diagonal part of pi(z11) = 0",
                normalized_residual(part, sp.csr_matrix(part.shape, dtype=complex)),
                margin,
                _setting("QMB_STRUCTURE_TOLERANCE", 1e-14),
            )
        )

    for name, factor in (("z21", q), ("z12", q), ("z22", 1.0)):
        other = rep.operators[name]
        for symbol, x in (("a", a), ("a*", a_star)):
            checks.append(
                ResidualReport(
                    f"commute-{symbol}-{name}",
                    f"{symbol} {name} = {'q ' if factor != 1.0 else ''}{name} {symbol}",
                    normalized_residual(x @ other @ block, factor * (other @ x) @ block),
                    margin,
                    tol,
                )
            )

    report = DecompositionReport(rep.spec.tag, branch, tuple(checks))
    if not report.passed:
        logger.warning("Diagonal decomposition fails on %s.", rep.spec.tag.value)
    return report


@dataclass(frozen=True)
class WeightReport:
    values: np.ndarray = field(repr=False)
    complements: np.ndarray = field(repr=False)
    commutator_norm: float
    off_diagonal: float
    complement_error: float
    simple: bool
    min_gap: float | None
    tolerance: float

    @property
    def passed(self) -> bool:
        return (
            self.simple
            and self.commutator_norm < self.tolerance
            and self.complement_error < self.tolerance
            and self.off_diagonal <= _setting("QMB_STRUCTURE_TOLERANCE", 1e-14)
        )

    def as_dict(self) -> dict:
        return {
            "simple": self.simple,
            "minGap": self.min_gap,
            "commutatorNorm": self.commutator_norm,
            "complementError": self.complement_error,
            "pass": self.passed,
        }


def minimum_gap(values: np.ndarray) -> float | None:
    """Smallest Chebyshev distance between two rows."""
    if len(values) < 2:
        return None
    return float(
        min(np.max(np.abs(values[i + 1:] - values[i]), axis=1).min() for i in range(len(values) - 1))
    )


def weight_complements(rep: TruncatedRep) -> tuple[np.ndarray, np.ndarray]:
    """
    Closed-form (bound, bound - weight) columns for the weight diagonals.

    Columns follow the order of ``weight_diagnostics``: z22 z22*, z21 z21*,
    z12 z12*, then the diagonal part of z11 times its adjoint.  A weight such
    as 1 - q^(2k) rounds to its bound once q^(2k) drops below the float
    epsilon; the complement column still carries q^(2k).  Columns without a
    bound are NaN in ``bounds`` and zero in ``complements``.
    """
    q2 = rep.q_value ** 2
    tag = rep.spec.tag
    bounds = np.full((rep.dimension, 4), np.nan)
    complements = np.zeros((rep.dimension, 4))

    def axis(name: str) -> np.ndarray:
        return rep.lattice.axis(name).astype(float)

    def put(column: int, bound, complement) -> None:
        bounds[:, column] = bound
        complements[:, column] = complement

    if tag is SeriesTag.ONE_DIM:
        return bounds, complements
    k = axis("k")
    if tag is SeriesTag.PI:
        put(3, 1.0 / q2, q2 ** k / q2)
        return bounds, complements
    put(0, 1.0, rep.defect_diagonal())
    if tag in (SeriesTag.RHO1, SeriesTag.HAT_RHO, SeriesTag.RHO_FULL):
        put(1, q2 ** k, q2 ** (k + axis("m")))
    if tag is SeriesTag.RHO2:
        put(2, q2 ** k, q2 ** (k + axis("m")))
    if tag in (SeriesTag.HAT_RHO, SeriesTag.RHO_FULL):
        put(2, q2 ** k, q2 ** (k + axis("l")))
    if tag is SeriesTag.RHO_FULL:
        cone = q2 ** (axis("m") + axis("l"))
        put(3, cone, cone * q2 ** axis("s"))
    return bounds, complements


def weight_diagnostics(rep: TruncatedRep, tol: float | None = None) -> WeightReport:
    """
    Joint spectrum of the four diagonal weights and its minimal Chebyshev gap.

    Distinctness is decided on the weights together with their closed-form
    complements, and the complements are checked against the computed
    diagonals.
    """
    if tol is None:
        tol = _setting("QMB_COMMUTATOR_TOLERANCE", 1e-12)
    a = diagonal_part_z11(rep)
    b_weight, c_weight, d_weight = commuting_family(rep)
    operators = [d_weight, b_weight, c_weight, (a @ a.conj().T).tocsr()]
    commutator = 0.0
    for i, left in enumerate(operators):
        for right in operators[i + 1:]:
            difference = abs(left @ right - right @ left)
            commutator = max(commutator, float(difference.max()) if difference.nnz else 0.0)
    values = np.column_stack([matrix.diagonal().real for matrix in operators])
    bounds, complements = weight_complements(rep)
    bounded = ~np.isnan(bounds)
    deviation = np.abs(values - (bounds - complements))[bounded]
    complement_error = float(deviation.max()) if deviation.size else 0.0
    gap = minimum_gap(np.hstack([values, complements]))
    return WeightReport(
        values=values,
        complements=complements,
        commutator_norm=commutator,
        off_diagonal=max(_off_diagonal_mass(matrix) for matrix in operators),
        complement_error=complement_error,
        simple=gap is None or gap > 0.0,
        min_gap=gap,
        tolerance=tol,
    )


@dataclass(frozen=True)
class SeriesFingerprint:
    rank: int
    spectrum: tuple[tuple[float, float, float], ...] = field(repr=False)
    kernel_dimensions: tuple[tuple[str, int], ...]
    diagonal_generators: tuple[str, ...]

    @property
    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.spectrum).encode()).hexdigest()

    def as_dict(self) -> dict:
        return {
            "rank": self.rank,
            "spectrumSize": len(self.spectrum),
            "spectrumDigest": self.digest,
            "kernelDimensions": dict(self.kernel_dimensions),
            "diagonalGenerators": list(self.diagonal_generators),
        }


def _is_diagonal(matrix: sp.spmatrix) -> bool:
    coo = matrix.tocoo()
    return coo.nnz > 0 and bool(np.all(coo.row == coo.col))


def series_fingerprint(
    rep: TruncatedRep, margin: int | None = None, spectrum: SpectrumReport | None = None
) -> SeriesFingerprint:
    columns = rep.lattice.interior(_margin(margin))
    if columns.size == 0:
        columns = np.arange(rep.dimension)
    spectrum = spectrum or joint_spectrum(rep)
    rounded = tuple(
        sorted(tuple(round(x, 9) + 0.0 for x in point.triple) for point in spectrum.points)
    )
    kernels = []
    diagonal = []
    for name, matrix in rep.operators.items():
        norms = column_norms(matrix[:, columns])
        kernels.append((name, int(np.count_nonzero(norms == 0.0))))
        if _is_diagonal(matrix):
            diagonal.append(name)
    return SeriesFingerprint(rep.lattice.rank, rounded, tuple(kernels), tuple(diagonal))


@dataclass(frozen=True)
class VerificationReport:
    spec: SeriesSpec
    cutoff: int
    margin: int
    relations: tuple[ResidualReport, ...]
    cross_identities: tuple[ResidualReport, ...]
    bridge: ResidualReport
    spectrum: SpectrumReport
    decomposition: DecompositionReport
    weights: WeightReport
    fingerprint: SeriesFingerprint

    @property
    def passed(self) -> bool:
        return (
            all(report.passed for report in self.relations)
            and all(report.passed for report in self.cross_identities)
            and self.bridge.passed
            and self.spectrum.matched
            and self.decomposition.passed
            and self.weights.passed
        )

    def to_dict(self) -> dict:
        return {
            "series": self.spec.tag.value,
            "phases": list(self.spec.phases),
            "q": self.spec.q_value,
            "cutoff": self.cutoff,
            "margin": self.margin,
            "relations": [report.as_dict() for report in self.relations],
            "crossIdentities": [report.as_dict() for report in self.cross_identities],
            "bridge": self.bridge.as_dict(),
            "spectrum": self.spectrum.as_dict(),
            "decomposition": self.decomposition.as_dict(),
            "weights": self.weights.as_dict(),
            "fingerprint": self.fingerprint.as_dict(),
            "passed": self.passed,
        }


def run_verification(
    spec: SeriesSpec,
    cutoff: int | None = None,
    margin: int | None = None,
    tol: float | None = None,
) -> VerificationReport:
    margin = _margin(margin)
    if cutoff is None:
        cutoff = default_cutoff(spec.tag, margin)
    check_cutoff(spec.tag, cutoff, margin)
    rep = build_representation(spec, cutoff)
    spectrum = joint_spectrum(rep, tol)
    report = VerificationReport(
        spec=spec,
        cutoff=cutoff,
        margin=margin,
        relations=tuple(relation_residuals(rep, margin, tol)),
        cross_identities=tuple(cross_identity_check(rep, margin, tol)),
        bridge=symbolic_numeric_bridge(rep, random_words(BRIDGE_WORDS, margin), margin, tol),
        spectrum=spectrum,
        decomposition=diagonal_decomposition_check(rep, margin, tol, spectrum),
        weights=weight_diagnostics(rep),
        fingerprint=series_fingerprint(rep, margin, spectrum),
    )
    logger.info(
        "Verification finished series=%s phases=%s q=%s cutoff=%s passed=%s",
        spec.tag.value,
        spec.phases,
        spec.q_value,
        cutoff,
        report.passed,
    )
    return report


@dataclass(frozen=True)
class VerificationJob:
    series: SeriesTag
    phases: tuple[float, ...]
    q_value: float
    cutoff: int | None = None
    margin: int | None = None

    def spec(self) -> SeriesSpec:
        return SeriesSpec(self.series, self.phases, self.q_value)

    def run(self) -> VerificationReport:
        return run_verification(self.spec(), self.cutoff, self.margin)


def phase_grid(tag: SeriesTag) -> list[tuple[float, ...]]:
    arity = SeriesTag(tag).arity
    if arity == 0:
        return [()]
    if arity == 1:
        return [(phi,) for phi in PHASE_GRID]
    return [
        (PHASE_GRID[i], PHASE_GRID[(i + 1) % len(PHASE_GRID)]) for i in range(len(PHASE_GRID))
    ]


def verification_grid(q_values: Sequence[float] | None = None, margin: int | None = None) -> list[VerificationJob]:
    if q_values is None:
        q_values = _setting("QMB_Q_GRID", [0.3, 0.5, 0.8])
    return [
        VerificationJob(tag, phases, float(q_value), margin=margin)
        for q_value in q_values
        for tag in SeriesTag
        for phases in phase_grid(tag)
    ]


def run_verification_suite(
    jobs: Sequence[VerificationJob], workers: int | None = None
) -> list[VerificationReport]:
    """Run independent jobs on a thread pool; results come back in job order."""
    if workers is None:
        workers = _setting("QMB_VERIFY_WORKERS", 4)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        reports = list(pool.map(VerificationJob.run, jobs))
    failed = sum(1 for report in reports if not report.passed)
    logger.info("Verification suite finished: %d jobs, %d failed.", len(reports), failed)
    return reports


def report_flags(data: dict) -> dict[str, bool]:
    flags = {f"relation:{entry['id']}": entry["pass"] for entry in data["relations"]}
    flags.update({f"cross:{entry['id']}": entry["pass"] for entry in data.get("crossIdentities", [])})
    if "bridge" in data:
        flags["bridge"] = data["bridge"]["pass"]
    flags["spectrum"] = data["spectrum"]["matched"]
    flags["decomposition"] = data["decomposition"]["pass"]
    flags["weights"] = data["weights"]["pass"]
    flags["passed"] = data["passed"]
    return flags


def _job_from_dict(data: dict) -> VerificationJob:
    return VerificationJob(
        SeriesTag(data["series"]),
        tuple(data["phases"]),
        float(data["q"]),
        int(data["cutoff"]),
        int(data["margin"]),
    )


def check_report(data: dict) -> list[str]:
    """
    Rerun every stored verification and compare pass/fail flags.

    Returns human-readable mismatches; an empty list means the flags were
    reproduced.
    """
    runs = data["runs"] if "runs" in data else [data]
    mismatches = []
    for position, stored in enumerate(runs):
        for entry in stored["relations"] + stored.get("crossIdentities", []):
            if entry["pass"] != (entry["residual"] < entry["tolerance"]):
                mismatches.append(f"run {position}: stored flag of {entry['id']} contradicts its residual")
        fresh = _job_from_dict(stored).run().to_dict()
        expected, actual = report_flags(stored), report_flags(fresh)
        for name in sorted(set(expected) | set(actual)):
            if expected.get(name) != actual.get(name):
                mismatches.append(
                    f"run {position} ({stored['series']}): {name} stored={expected.get(name)} rerun={actual.get(name)}"
                )
    return mismatches

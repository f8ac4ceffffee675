import json
import math
from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase, override_settings

from core.services.algebra import parse_word
from core.services.dynsys import OrbitTag
from core.services.report_format import dumps, render_markdown, suite_to_dict
from core.services.representations import SeriesSpec, SeriesTag, build_representation, represent_polynomial
from core.services.verification import (
    PHASE_GRID,
    VerificationConfigError,
    VerificationJob,
    check_cutoff,
    check_report,
    cross_identity_check,
    default_cutoff,
    diagonal_decomposition_check,
    joint_spectrum,
    minimum_gap,
    phase_grid,
    random_words,
    relation_residuals,
    run_verification,
    run_verification_suite,
    series_fingerprint,
    series_orbit_table,
    symbolic_numeric_bridge,
    verification_grid,
    weight_diagnostics,
)

Q = 0.5
Q_GRID = (0.3, 0.5, 0.8)


def _rep(tag, phases=None, q_value=Q, cutoff=None):
    tag = SeriesTag(tag)
    if phases is None:
        phases = phase_grid(tag)[1]
    return build_representation(SeriesSpec(tag, phases, q_value), cutoff or default_cutoff(tag))


class CutoffTests(SimpleTestCase):
    def test_default_cutoffs_per_rank(self):
        self.assertEqual(default_cutoff(SeriesTag.ONE_DIM), 1)
        self.assertEqual(default_cutoff(SeriesTag.PI), 20)
        self.assertEqual(default_cutoff(SeriesTag.RHO1), 12)
        self.assertEqual(default_cutoff(SeriesTag.HAT_RHO), 8)
        # 6 leaves no interior at margin 3
        self.assertEqual(default_cutoff(SeriesTag.RHO_FULL), 7)

    @override_settings(QMB_DEFAULT_CUTOFFS=[10, 9, 8, 9])
    def test_default_cutoffs_come_from_settings(self):
        self.assertEqual(default_cutoff(SeriesTag.RHO12), 10)
        self.assertEqual(default_cutoff(SeriesTag.RHO_FULL), 9)

    def test_empty_interior_is_a_configuration_error(self):
        with self.assertRaises(VerificationConfigError):
            check_cutoff(SeriesTag.RHO_FULL, 4, 3)
        with self.assertRaises(VerificationConfigError):
            check_cutoff(SeriesTag.PI, 20, 2)
        check_cutoff(SeriesTag.ONE_DIM, 1, 3)

    def test_relation_residuals_reject_small_cutoff(self):
        with self.assertRaises(VerificationConfigError):
            relation_residuals(_rep(SeriesTag.PI, cutoff=6), margin=3)

    def test_phase_grid(self):
        self.assertEqual(phase_grid(SeriesTag.RHO_FULL), [()])
        self.assertEqual(len(phase_grid(SeriesTag.PI)), 6)
        self.assertIn((1.0,), phase_grid(SeriesTag.HAT_RHO))
        pairs = phase_grid(SeriesTag.RHO12)
        self.assertEqual(pairs[0], (PHASE_GRID[0], PHASE_GRID[1]))
        self.assertTrue(all(0.0 <= phi < 2 * math.pi for pair in pairs for phi in pair))


class RelationResidualTests(SimpleTestCase):
    def test_one_dimensional_residuals_are_exact(self):
        reports = relation_residuals(_rep(SeriesTag.ONE_DIM, (0.3, 2.0)))
        self.assertEqual(len(reports), 17)
        for report in reports:
            self.assertLess(report.residual, 1e-14, msg=report.identifier)

    def test_pi_reduced_relation(self):
        reports = {r.identifier: r for r in relation_residuals(_rep(SeriesTag.PI, (0.0,)))}
        self.assertLess(reports["pi-reduced"].residual, 1e-12)

    def test_reduced_relation_only_for_unitary_z22_series(self):
        identifiers = [r.identifier for r in relation_residuals(_rep(SeriesTag.RHO12))]
        self.assertEqual(len(identifiers), 16)
        self.assertNotIn("pi-reduced", identifiers)

    def test_all_relations_hold_for_every_series_phase_and_q(self):
        for q_value in Q_GRID:
            for tag in SeriesTag:
                for phases in phase_grid(tag):
                    rep = _rep(tag, phases, q_value)
                    for report in relation_residuals(rep):
                        with self.subTest(series=tag.value, phases=phases, q=q_value, relation=report.identifier):
                            self.assertLess(report.residual, 1e-10)

    def test_cross_identities(self):
        for tag in SeriesTag:
            for report in cross_identity_check(_rep(tag)):
                self.assertTrue(report.symbolic_zero)
                self.assertLess(report.residual, 1e-10, msg=f"{tag.value} {report.identifier}")
        for report in cross_identity_check(_rep(SeriesTag.ONE_DIM)):
            self.assertLess(report.residual, 1e-14)


class BridgeTests(SimpleTestCase):
    def test_random_words_are_reproducible(self):
        self.assertEqual(random_words(10, 5, seed=3), random_words(10, 5, seed=3))
        self.assertTrue(all(len(word) <= 5 for word in random_words(50, 5)))

    def test_normal_forms_match_matrix_products(self):
        words = random_words(100, 5, seed=0)
        for tag in SeriesTag:
            rep = _rep(tag, cutoff=11)
            report = symbolic_numeric_bridge(rep, words, margin=5)
            self.assertLess(report.residual, 1e-10, msg=tag.value)

    def test_words_longer_than_margin_are_rejected(self):
        with self.assertRaises(VerificationConfigError):
            symbolic_numeric_bridge(_rep(SeriesTag.PI), [parse_word("z11 z21 z12 z22")], margin=3)


class JointSpectrumTests(SimpleTestCase):
    def test_orbit_table(self):
        table = series_orbit_table()
        self.assertIs(table[SeriesTag.PI], OrbitTag.OMEGA_001)
        self.assertIs(table[SeriesTag.RHO12], OrbitTag.OMEGA_110)
        self.assertIs(table[SeriesTag.RHO1], OrbitTag.OMEGA_010)
        self.assertIs(table[SeriesTag.RHO2], OrbitTag.OMEGA_100)
        self.assertIs(table[SeriesTag.HAT_RHO], OrbitTag.OMEGA_000)
        self.assertIs(table[SeriesTag.RHO_FULL], OrbitTag.OMEGA_000)

    def test_rho12_triples(self):
        spectrum = joint_spectrum(_rep(SeriesTag.RHO12, cutoff=3))
        triples = [point.triple for point in spectrum.points]
        expected = [(1.0, 1.0, 0.0), (Q ** 2, Q ** 2, 1 - Q ** 2), (Q ** 4, Q ** 4, 1 - Q ** 4)]
        for triple, value in zip(triples, expected):
            for x, y in zip(triple, value):
                self.assertAlmostEqual(x, y, places=14)
        self.assertEqual([point.exponents for point in spectrum.points], [(0, 0, 0), (0, 0, 1), (0, 0, 2)])

    def test_pi_spectrum_is_the_fixed_point(self):
        spectrum = joint_spectrum(_rep(SeriesTag.PI, (2.0,)))
        self.assertTrue(spectrum.matched)
        for point in spectrum.points:
            self.assertEqual(point.triple[:2], (0.0, 0.0))
            self.assertAlmostEqual(point.triple[2], 1.0, places=15)

    def test_rho_full_exponents_are_the_lattice_coordinates(self):
        spectrum = joint_spectrum(_rep(SeriesTag.RHO_FULL))
        self.assertTrue(spectrum.matched)
        for point in spectrum.points:
            self.assertEqual(point.exponents, point.index[1:])

    def test_rho1_and_rho2_swap_coordinates(self):
        rho1 = joint_spectrum(_rep(SeriesTag.RHO1, (0.0,), cutoff=5))
        rho2 = joint_spectrum(_rep(SeriesTag.RHO2, (0.0,), cutoff=5))
        for p1, p2 in zip(rho1.points, rho2.points):
            self.assertEqual(p1.triple[0], p2.triple[1])
            self.assertEqual(p1.triple[1], p2.triple[0])

    def test_every_series_matches_its_orbit(self):
        for q_value in Q_GRID:
            for tag in SeriesTag:
                for phases in phase_grid(tag):
                    spectrum = joint_spectrum(_rep(tag, phases, q_value))
                    with self.subTest(series=tag.value, phases=phases, q=q_value):
                        self.assertEqual(spectrum.unmatched, 0)
                        self.assertLess(spectrum.max_error, 1e-10)
                        self.assertLessEqual(spectrum.off_diagonal, 1e-14)


class DecompositionTests(SimpleTestCase):
    def _checks(self, tag, phases=None, q_value=Q):
        report = diagonal_decomposition_check(_rep(tag, phases, q_value))
        return report, {check.identifier: check for check in report.checks}

    def test_branches(self):
        self.assertEqual(self._checks(SeriesTag.PI)[0].branch, "unitary-z22")
        self.assertEqual(self._checks(SeriesTag.ONE_DIM)[0].branch, "unitary-z22")
        self.assertEqual(self._checks(SeriesTag.RHO1)[0].branch, "vanishing")
        self.assertEqual(self._checks(SeriesTag.HAT_RHO)[0].branch, "oscillator")

    def test_diagonal_part_vanishes_off_the_origin_orbit(self):
        for tag in (SeriesTag.RHO12, SeriesTag.RHO1, SeriesTag.RHO2):
            for q_value in Q_GRID:
                _, checks = self._checks(tag, q_value=q_value)
                self.assertLess(checks["zero"].residual, 1e-14, msg=f"{tag.value} q={q_value}")

    def test_block_identity_on_the_origin_orbit(self):
        for tag in (SeriesTag.HAT_RHO, SeriesTag.RHO_FULL):
            for q_value in Q_GRID:
                _, checks = self._checks(tag, q_value=q_value)
                self.assertLess(checks["block-identity"].residual, 1e-10)

    def test_every_series_passes(self):
        for q_value in Q_GRID:
            for tag in SeriesTag:
                for phases in phase_grid(tag):
                    report, checks = self._checks(tag, phases, q_value)
                    with self.subTest(series=tag.value, phases=phases, q=q_value):
                        self.assertTrue(report.passed, msg={k: c.residual for k, c in checks.items()})
                        self.assertIn("split", checks)
                        self.assertIn("commute-a-z21", checks)
                        self.assertIn("commute-a*-z22", checks)


class WeightTests(SimpleTestCase):
    def test_rho12_gap_at_the_top_of_the_box(self):
        report = weight_diagnostics(_rep(SeriesTag.RHO12, cutoff=8))
        self.assertTrue(report.simple)
        self.assertAlmostEqual(report.min_gap, Q ** 12 * (1 - Q ** 2), places=14)
        self.assertGreaterEqual(report.min_gap, Q ** 14 * (1 - Q ** 2))

    def test_one_dimensional_is_trivially_simple(self):
        report = weight_diagnostics(_rep(SeriesTag.ONE_DIM))
        self.assertTrue(report.simple)
        self.assertIsNone(report.min_gap)

    def test_rho_full_fourth_coordinate_separates_s(self):
        rep = _rep(SeriesTag.RHO_FULL, cutoff=4)
        report = weight_diagnostics(rep)
        self.assertTrue(report.passed)
        for index, values in enumerate(report.values):
            s, m, l, _ = rep.lattice.multi_index(index)
            self.assertAlmostEqual(values[3], Q ** (2 * (m + l)) * (1 - Q ** (2 * s)), places=12)

    def test_every_series_has_simple_spectrum(self):
        for q_value in Q_GRID:
            for tag in SeriesTag:
                rep = _rep(tag, q_value=q_value)
                report = weight_diagnostics(rep)
                with self.subTest(series=tag.value, q=q_value):
                    self.assertTrue(report.passed, msg=report.as_dict())
                    if rep.lattice.rank:
                        self.assertGreater(report.min_gap, 0.0)
                    if rep.lattice.rank == 1 and q_value == Q:
                        self.assertGreaterEqual(
                            report.min_gap, Q ** (2 * (rep.lattice.cutoff - 1)) * (1 - Q ** 2)
                        )

    def test_pi_weights_stay_apart_after_rounding_to_their_bound(self):
        q_value = 0.3
        rep = _rep(SeriesTag.PI, q_value=q_value, cutoff=20)
        report = weight_diagnostics(rep)
        # (1 - q^(2k)) / q^2 is already 1 / q^2 in floats at the top of the box
        self.assertEqual(len(set(report.values[16:, 3])), 1)
        self.assertTrue(report.simple)
        self.assertTrue(report.passed)
        k = np.arange(20)
        np.testing.assert_allclose(report.complements[:, 3], q_value ** (2 * k) / q_value ** 2, rtol=1e-12)
        self.assertAlmostEqual(
            report.min_gap, q_value ** 34 * (1 - q_value ** 2), delta=1e-3 * q_value ** 34
        )
        self.assertLess(report.complement_error, 1e-12)

    def test_minimum_gap(self):
        values = np.array([[0.0, 1.0], [0.5, 1.0], [0.5, 1.25]])
        self.assertEqual(minimum_gap(values), 0.25)
        self.assertIsNone(minimum_gap(values[:1]))


class FingerprintTests(SimpleTestCase):
    def test_series_are_told_apart(self):
        fingerprints = {}
        for tag in SeriesTag:
            rep = _rep(tag, cutoff=7)
            fingerprints[tag] = series_fingerprint(rep)
        self.assertEqual(fingerprints[SeriesTag.ONE_DIM].rank, 0)
        self.assertEqual(fingerprints[SeriesTag.PI].rank, 1)
        self.assertEqual(fingerprints[SeriesTag.HAT_RHO].rank, 3)
        self.assertEqual(fingerprints[SeriesTag.RHO_FULL].rank, 4)
        self.assertNotEqual(
            fingerprints[SeriesTag.RHO1].diagonal_generators,
            fingerprints[SeriesTag.RHO2].diagonal_generators,
        )
        serialized = {json.dumps(f.as_dict(), sort_keys=True) for f in fingerprints.values()}
        self.assertEqual(len(serialized), len(SeriesTag))


class RunVerificationTests(SimpleTestCase):
    def test_pi_run_passes(self):
        report = run_verification(SeriesSpec(SeriesTag.PI, (0.0,), Q), cutoff=20)
        self.assertTrue(report.passed)
        data = report.to_dict()
        self.assertEqual(data["spectrum"]["orbit"], "0,0,1")
        self.assertEqual(len(data["relations"]), 17)
        for key in ("series", "phases", "q", "cutoff", "margin", "decomposition", "weights", "fingerprint"):
            self.assertIn(key, data)

    def test_pi_run_passes_at_small_q(self):
        report = run_verification(SeriesSpec(SeriesTag.PI, (0.0,), 0.3))
        self.assertEqual(report.cutoff, 20)
        self.assertTrue(report.weights.passed, msg=report.weights.as_dict())
        self.assertTrue(report.passed)

    def test_bridge_certifies_the_polynomial_representation(self):
        with patch(
            "core.services.verification.represent_polynomial", wraps=represent_polynomial
        ) as represented:
            report = run_verification(SeriesSpec(SeriesTag.RHO1, (1.0,), Q))
        self.assertEqual(represented.call_count, 100)
        self.assertEqual(report.bridge.label, "100 words")
        self.assertTrue(report.bridge.passed)

    def test_rho_full_run_reports_origin_orbit(self):
        report = run_verification(SeriesSpec(SeriesTag.RHO_FULL, (), Q), cutoff=7)
        self.assertTrue(report.passed)
        self.assertEqual(report.to_dict()["spectrum"]["orbit"], "0,0,0")

    def test_full_grid_passes(self):
        jobs = verification_grid(Q_GRID)
        self.assertEqual(len(jobs), 3 * 37)
        reports = run_verification_suite(jobs, workers=4)
        failed = [(r.spec.tag.value, r.spec.phases, r.spec.q_value) for r in reports if not r.passed]
        self.assertEqual(failed, [])
        data = suite_to_dict(reports)
        self.assertTrue(data["passed"])
        self.assertEqual(len(data["runs"]), len(jobs))

    def test_suite_preserves_job_order(self):
        jobs = [
            VerificationJob(SeriesTag.RHO12, (0.0, 1.0), 0.8),
            VerificationJob(SeriesTag.ONE_DIM, (1.0, 0.0), 0.3),
        ]
        reports = run_verification_suite(jobs, workers=2)
        self.assertEqual([r.spec.tag for r in reports], [SeriesTag.RHO12, SeriesTag.ONE_DIM])


class ReportCheckTests(SimpleTestCase):
    def _stored(self):
        report = run_verification(SeriesSpec(SeriesTag.RHO12, (0.5, 1.5), Q))
        return json.loads(dumps(report.to_dict()))

    def test_rerun_reproduces_flags(self):
        self.assertEqual(check_report(self._stored()), [])
        self.assertEqual(check_report({"runs": [self._stored()], "passed": True}), [])

    def test_tampered_flags_are_reported(self):
        data = self._stored()
        data["relations"][0]["pass"] = False
        data["weights"]["pass"] = False
        mismatches = check_report(data)
        self.assertTrue(any("contradicts" in line for line in mismatches))
        self.assertTrue(any("weights" in line for line in mismatches))

    def test_markdown_rendering(self):
        text = render_markdown(self._stored())
        self.assertTrue(text.startswith("# Relatorio de verificacao"))
        self.assertIn("## rho12", text)
        self.assertIn("Orbita: 1,1,0", text)

import random

from django.test import SimpleTestCase, override_settings

from core.services.algebra import (
    Letter,
    NormalMonomial,
    NormalPolynomial,
    RewritingBudgetExceeded,
    Strategy,
    WordParseError,
    cross_identities,
    defining_relations,
    evaluate_coefficients,
    multiply,
    normal_form,
    parse_word,
    rewrite_rules,
    star,
)
from core.services.laurent import ONE, Q, QDomainError


def _monomial(text):
    return NormalMonomial.from_word(parse_word(text))


def _poly(*pairs):
    return NormalPolynomial({_monomial(text): coefficient for coefficient, text in pairs})


def _random_word(rng, max_length, min_length=0):
    letters = list(Letter)
    return tuple(rng.choice(letters) for _ in range(rng.randint(min_length, max_length)))


class ParseWordTests(SimpleTestCase):
    def test_tokens_map_to_letters(self):
        self.assertEqual(parse_word("z11 z21*"), (Letter.Z11, Letter.Z21_STAR))
        self.assertEqual(parse_word("  z22*   z12 "), (Letter.Z22_STAR, Letter.Z12))

    def test_empty_text_is_the_unit_word(self):
        self.assertEqual(parse_word(""), ())
        self.assertEqual(normal_form(""), NormalPolynomial.unit())

    def test_unknown_token_reports_its_position(self):
        with self.assertRaises(WordParseError) as ctx:
            parse_word("z13")
        self.assertEqual(ctx.exception.token, "z13")
        self.assertEqual(ctx.exception.position, 1)

        with self.assertRaises(WordParseError) as ctx:
            parse_word("z11 z21 z11**")
        self.assertEqual(ctx.exception.position, 3)


class NormalFormTests(SimpleTestCase):
    def test_holomorphic_q_commutation(self):
        self.assertEqual(normal_form("z21 z11"), _poly((Q ** -1, "z11 z21")))

    def test_z22_z11_produces_commutator_term(self):
        expected = _poly((ONE, "z11 z22"), (-(Q - Q ** -1), "z21 z12"))
        self.assertEqual(normal_form("z22 z11"), expected)

    def test_diagonal_star_relation_of_z22(self):
        result = normal_form("z22* z22")
        self.assertEqual(result, _poly((Q ** 2, "z22 z22*"), (ONE - Q ** 2, "")))
        self.assertEqual(str(result), "q^2 * z22 z22* + (1 - q^2) * 1")

    def test_mixed_relation_of_z11_star_and_z21(self):
        expected = _poly((Q, "z21 z11*"), (Q - Q ** -1, "z22 z12*"))
        self.assertEqual(normal_form("z11* z21"), expected)

    def test_negative_monomial_coefficients_print_as_subtraction(self):
        self.assertEqual(str(_poly((ONE, "z11 z22"), (-Q, "z21 z12"))), "z11 z22 - q * z21 z12")
        self.assertEqual(str(_poly((-Q ** 2, "z22 z22*"), (ONE, ""))), "-q^2 * z22 z22* + 1")
        self.assertEqual(str(_poly((-ONE, "z11"),)), "-z11")
        self.assertEqual(str(_poly((ONE, "z11"), (-ONE, "z22"))), "z11 - z22")

    def test_unit_prints_as_one(self):
        self.assertEqual(str(normal_form("")), "1")
        self.assertEqual(str(NormalPolynomial.zero()), "0")

    def test_normal_monomial_is_its_own_normal_form(self):
        rng = random.Random(3)
        for _ in range(200):
            word = tuple(sorted(_random_word(rng, 6), key=lambda letter: letter.rank))
            monomial = NormalMonomial.from_word(word)
            self.assertEqual(normal_form(word), NormalPolynomial({monomial: ONE}))

    def test_strategies_agree_on_random_words(self):
        rng = random.Random(2024)
        for _ in range(1000):
            word = _random_word(rng, 6)
            self.assertEqual(
                normal_form(word, Strategy.LEFTMOST),
                normal_form(word, Strategy.RIGHTMOST),
                msg=" ".join(str(letter) for letter in word),
            )

    def test_words_up_to_length_eight_terminate_within_budget(self):
        rng = random.Random(8)
        for _ in range(50):
            word = _random_word(rng, 8, min_length=6)
            result = normal_form(word, step_budget=500_000)
            self.assertIsInstance(result, NormalPolynomial)

    def test_step_budget_is_enforced(self):
        with self.assertRaises(RewritingBudgetExceeded):
            normal_form("z22* z22", step_budget=0)

    @override_settings(QMB_REWRITE_STEP_BUDGET=1)
    def test_step_budget_comes_from_settings(self):
        with self.assertRaises(RewritingBudgetExceeded):
            normal_form("z11* z11 z22* z22")

    def test_rule_table_covers_every_inverted_pair(self):
        rules = rewrite_rules()
        self.assertEqual(len(rules), 28)
        for left, right in rules:
            self.assertGreater(left.rank, right.rank)


class MultiplyAndStarTests(SimpleTestCase):
    def test_unit_is_neutral(self):
        p = normal_form("z11* z21 z22")
        self.assertEqual(multiply(NormalPolynomial.unit(), p), p)
        self.assertEqual(multiply(p, NormalPolynomial.unit()), p)

    def test_commutator_of_z11_and_z22(self):
        z11 = NormalPolynomial.letter(Letter.Z11)
        z22 = NormalPolynomial.letter(Letter.Z22)
        self.assertEqual(multiply(z11, z22) - multiply(z22, z11), _poly((Q - Q ** -1, "z21 z12")))

    def test_multiplication_is_associative(self):
        rng = random.Random(11)
        for _ in range(200):
            a, b, c = (normal_form(_random_word(rng, 4)) for _ in range(3))
            self.assertEqual(multiply(multiply(a, b), c), multiply(a, multiply(b, c)))

    def test_star_of_single_letter(self):
        self.assertEqual(star(NormalPolynomial.letter(Letter.Z22)), NormalPolynomial.letter(Letter.Z22_STAR))

    def test_star_of_product(self):
        self.assertEqual(star(normal_form("z11 z21")), _poly((Q, "z11* z21*")))

    def test_star_is_an_involutive_anti_homomorphism(self):
        rng = random.Random(5)
        for _ in range(100):
            p1 = normal_form(_random_word(rng, 3))
            p2 = normal_form(_random_word(rng, 3))
            self.assertEqual(star(star(p1)), p1)
            self.assertEqual(star(multiply(p1, p2)), multiply(star(p2), star(p1)))


class RelationTests(SimpleTestCase):
    def test_there_are_sixteen_defining_relations(self):
        self.assertEqual(len(defining_relations()), 16)
        self.assertEqual([relation.identifier for relation in defining_relations()], [str(i) for i in range(1, 17)])

    def test_every_relation_and_its_adjoint_reduce_to_zero(self):
        for relation in defining_relations():
            for strategy in Strategy:
                self.assertTrue(relation.reduce(strategy).is_zero(), msg=relation.label)
                self.assertTrue(relation.adjoint().reduce(strategy).is_zero(), msg=relation.label)

    def test_z12_z22_relation_is_consistent(self):
        relation = next(r for r in defining_relations() if r.label == "z12 z22 = q z22 z12")
        self.assertTrue(relation.reduce().is_zero())

    def test_cross_identities_follow_from_the_relations(self):
        identities = cross_identities()
        self.assertEqual([r.identifier for r in identities], ["cross-21", "cross-12", "cross-22"])
        for identity in identities:
            self.assertTrue(identity.reduce().is_zero(), msg=identity.label)


class EvaluateCoefficientsTests(SimpleTestCase):
    def test_numeric_coefficients_at_one_half(self):
        values = evaluate_coefficients(normal_form("z22 z11"), 0.5)
        self.assertEqual(values[_monomial("z11 z22")], 1.0)
        self.assertAlmostEqual(values[_monomial("z21 z12")], 1.5, places=15)

    def test_domain_is_open_unit_interval(self):
        with self.assertRaises(QDomainError):
            evaluate_coefficients(normal_form("z11"), 1.0)

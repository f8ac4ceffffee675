from django.core.management.base import BaseCommand

from core.services.algebra import (
    RewritingBudgetExceeded,
    Strategy,
    WordParseError,
    evaluate_coefficients,
    normal_form,
)
from core.services.laurent import QDomainError

from ._common import input_error


class Command(BaseCommand):
    help = "Reduz uma palavra nos geradores a forma normal."

    def add_arguments(self, parser):
        parser.add_argument(
            "word",
            nargs="?",
            default="",
            help='Palavra, ex: "z22* z22". Vazia representa 1.',
        )
        parser.add_argument(
            "--q",
            type=float,
            help="Avalia os coeficientes no valor informado de q.",
        )
        parser.add_argument(
            "--strategy",
            choices=[strategy.value for strategy in Strategy],
            default=Strategy.LEFTMOST.value,
            help="Ordem de escolha do redex.",
        )

    def handle(self, *args, **options):
        try:
            result = normal_form(options["word"], strategy=Strategy(options["strategy"]))
        except WordParseError as exc:
            raise input_error(exc)
        except RewritingBudgetExceeded as exc:
            raise input_error(exc)

        self.stdout.write(str(result))
        if options.get("q") is None:
            return
        try:
            values = evaluate_coefficients(result, options["q"])
        except QDomainError as exc:
            raise input_error(exc)
        for monomial, value in values.items():
            self.stdout.write(f"  {monomial}: {value!r}")

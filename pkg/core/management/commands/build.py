import json

from django.core.management.base import BaseCommand

from core.services.laurent import QDomainError
from core.services.representations import (
    SeriesSpec,
    SeriesSpecError,
    SeriesTag,
    build_representation,
)

from ._common import default_q, input_error, write_output


class Command(BaseCommand):
    help = "Monta a representacao truncada de uma serie e imprime as matrizes em JSON."

    def add_arguments(self, parser):
        parser.add_argument(
            "--series",
            required=True,
            choices=[tag.value for tag in SeriesTag],
            help="Serie de representacoes.",
        )
        parser.add_argument(
            "--phi",
            type=float,
            nargs="*",
            default=[],
            help="Fases em [0, 2pi), uma por parametro da serie.",
        )
        parser.add_argument("--q", type=float, help="Valor de q em (0,1).")
        parser.add_argument("--cutoff", type=int, required=True, help="Truncamento N por eixo.")
        parser.add_argument("--out", help="Arquivo JSON de saida.")

    def handle(self, *args, **options):
        try:
            spec = SeriesSpec(options["series"], tuple(options["phi"]), default_q(options.get("q")))
            rep = build_representation(spec, options["cutoff"])
        except (SeriesSpecError, QDomainError) as exc:
            raise input_error(exc)
        write_output(self, json.dumps(rep.to_dict()), options.get("out"))

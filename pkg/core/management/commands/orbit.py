import json

from django.core.management.base import BaseCommand

from core.services.dynsys import OrbitRangeError, OrbitTag, orbit_patch
from core.services.laurent import QDomainError

from ._common import default_q, input_error, write_output


class Command(BaseCommand):
    help = "Lista pontos de uma orbita do sistema dinamico associado."

    def add_arguments(self, parser):
        parser.add_argument(
            "--base",
            required=True,
            help="Ponto base x1,x2,x3 (um dos cinco admissiveis, ex: 0,0,0).",
        )
        parser.add_argument(
            "--range",
            type=int,
            default=3,
            help="Expoentes em [0,R) para m, l e k.",
        )
        parser.add_argument(
            "--symmetric",
            action="store_true",
            help="Usa expoentes em [-R,R).",
        )
        parser.add_argument("--q", type=float, help="Valor de q em (0,1).")
        parser.add_argument(
            "--all-exponents",
            action="store_true",
            help="Nao colapsa eixos que nao movem o ponto base.",
        )
        parser.add_argument("--out", help="Arquivo JSON de saida.")

    def handle(self, *args, **options):
        try:
            base = OrbitTag.from_text(options["base"])
        except ValueError as exc:
            raise input_error(exc)
        size = options["range"]
        if size < 1:
            raise input_error(ValueError("--range deve ser >= 1"))
        exponents = range(-size, size) if options["symmetric"] else range(size)
        q_value = default_q(options.get("q"))
        try:
            points = orbit_patch(
                base,
                exponents,
                exponents,
                exponents,
                q_value,
                distinct=not options["all_exponents"],
            )
        except (QDomainError, OrbitRangeError) as exc:
            raise input_error(exc)

        data = {
            "base": list(base.value),
            "q": q_value,
            "points": [
                {
                    "m": point.exponents[0],
                    "l": point.exponents[1],
                    "k": point.exponents[2],
                    "x": list(point.value),
                    "physical": point.is_physical,
                }
                for point in points
            ],
        }
        write_output(self, json.dumps(data, indent=2), options.get("out"))

import json
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from core.models import VerificationRun
from core.services.report_format import dumps, render_markdown
from core.services.verification import check_report

from ._common import input_error, write_output


class Command(BaseCommand):
    help = "Mostra, confere ou lista relatorios de verificacao."

    def add_arguments(self, parser):
        parser.add_argument("path", nargs="?", help="Relatorio JSON gerado pelo verify.")
        parser.add_argument(
            "--check",
            action="store_true",
            help="Reexecuta cada job do relatorio e compara os resultados.",
        )
        parser.add_argument("--format", choices=["json", "md"], default="md")
        parser.add_argument("--out", help="Arquivo de saida.")
        parser.add_argument(
            "--recent",
            type=int,
            metavar="N",
            help="Lista as N execucoes gravadas mais recentes.",
        )

    def handle(self, *args, **options):
        if options.get("recent"):
            self._list_recent(options["recent"])
            if not options.get("path"):
                return
        if not options.get("path"):
            raise input_error(ValueError("Informe o caminho do relatorio ou --recent N."))

        data = self._load(options["path"])
        if options["check"]:
            try:
                mismatches = check_report(data)
            except (KeyError, TypeError, ValueError) as exc:
                raise input_error(exc)
            for line in mismatches:
                self.stdout.write(self.style.ERROR(line))
            if mismatches:
                raise CommandError(f"{len(mismatches)} divergencia(s) encontradas.", returncode=1)
            self.stdout.write(self.style.SUCCESS("Resultados reproduzidos."))
            return

        text = render_markdown(data) if options["format"] == "md" else dumps(data)
        write_output(self, text, options.get("out"))

    def _load(self, path):
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise input_error(exc)
        if not isinstance(data, dict) or not ("runs" in data or "series" in data):
            raise input_error(ValueError(f"{path} nao e um relatorio de verificacao"))
        return data

    def _list_recent(self, count):
        runs = VerificationRun.objects.all()[:count]
        if not runs:
            self.stdout.write(self.style.WARNING("Nenhuma execucao gravada."))
            return
        for run in runs:
            status = self.style.SUCCESS("ok") if run.passed else self.style.ERROR("falhou")
            self.stdout.write(
                f"#{run.id} {run.created_at:%Y-%m-%d %H:%M} {run.series} "
                f"fases={run.phases} q={run.q_value} N={run.cutoff} {status}"
            )

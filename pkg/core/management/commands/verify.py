from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from core.models import VerificationRun
from core.services.laurent import QDomainError
from core.services.report_format import dumps, render_markdown, suite_to_dict
from core.services.representations import SeriesSpecError, SeriesTag
from core.services.verification import (
    StructuralError,
    VerificationConfigError,
    VerificationJob,
    check_cutoff,
    default_cutoff,
    run_verification_suite,
    verification_grid,
)
from core.tasks import verify_series_job

from ._common import default_q, input_error, write_output

CONFIG_ERRORS = (SeriesSpecError, VerificationConfigError, QDomainError)


class Command(BaseCommand):
    help = "Verifica relacoes, espectro e decomposicao das series truncadas."

    def add_arguments(self, parser):
        target = parser.add_mutually_exclusive_group(required=True)
        target.add_argument(
            "--series",
            choices=[tag.value for tag in SeriesTag],
            help="Verifica uma unica serie.",
        )
        target.add_argument(
            "--all",
            action="store_true",
            help="Todas as series na grade de fases e de q (QMB_Q_GRID).",
        )
        parser.add_argument("--phi", type=float, nargs="*", default=[], help="Fases da serie.")
        parser.add_argument("--q", type=float, help="Valor de q; com --all substitui a grade.")
        parser.add_argument("--cutoff", type=int, help="Truncamento N (padrao por posto).")
        parser.add_argument("--margin", type=int, help="Margem interior (>= 3).")
        parser.add_argument("--format", choices=["json", "md"], default="json")
        parser.add_argument("--out", help="Arquivo de saida do relatorio.")
        parser.add_argument("--workers", type=int, help="Threads para --all.")
        parser.add_argument(
            "--store",
            action="store_true",
            help="Grava cada relatorio como VerificationRun.",
        )
        parser.add_argument(
            "--enqueue",
            action="store_true",
            help="Envia os jobs para a fila do Celery em vez de rodar aqui.",
        )

    def _jobs(self, options) -> list[VerificationJob]:
        margin = options.get("margin")
        margin_given = margin is not None
        if not margin_given:
            margin = getattr(settings, "QMB_DEFAULT_MARGIN", 3)
        cutoff = options.get("cutoff")
        revisable = options.get("series") and SeriesTag(options["series"]).rank
        if revisable and cutoff is not None and not margin_given and cutoff <= 2 * margin:
            self.stderr.write(
                self.style.WARNING(f"Cutoff {cutoff} sem pontos interiores; usando {2 * margin + 1}.")
            )
            cutoff = 2 * margin + 1
        if options["all"]:
            if options["phi"] or cutoff is not None:
                raise input_error(ValueError("--phi e --cutoff nao se aplicam a --all"))
            q_values = None if options.get("q") is None else [options["q"]]
            jobs = verification_grid(q_values, margin)
        else:
            jobs = [
                VerificationJob(
                    SeriesTag(options["series"]),
                    tuple(options["phi"]),
                    default_q(options.get("q")),
                    cutoff,
                    margin,
                )
            ]
        # Configuration errors must surface before any job runs.
        try:
            for job in jobs:
                job.spec()
                effective = job.cutoff if job.cutoff is not None else default_cutoff(job.series, margin)
                check_cutoff(job.series, effective, margin)
        except CONFIG_ERRORS as exc:
            raise input_error(exc)
        return jobs

    def handle(self, *args, **options):
        jobs = self._jobs(options)

        if options["enqueue"]:
            for job in jobs:
                result = verify_series_job.delay(
                    job.series.value,
                    list(job.phases),
                    job.q_value,
                    job.cutoff,
                    job.margin,
                    store=True,
                )
                self.stdout.write(f"{job.series.value} {list(job.phases)} q={job.q_value}: {result.id}")
            self.stdout.write(self.style.SUCCESS(f"{len(jobs)} jobs enfileirados."))
            return

        try:
            reports = run_verification_suite(jobs, options.get("workers"))
        except CONFIG_ERRORS as exc:
            raise input_error(exc)
        except StructuralError as exc:
            raise CommandError(str(exc), returncode=1)

        if options["store"]:
            for report in reports:
                VerificationRun.from_report(report)

        data = suite_to_dict(reports) if options["all"] else reports[0].to_dict()
        text = render_markdown(data) if options["format"] == "md" else dumps(data)
        write_output(self, text, options.get("out"))

        if not data["passed"]:
            failed = sum(1 for report in reports if not report.passed)
            raise CommandError(f"{failed} verificacao(oes) falharam.", returncode=1)

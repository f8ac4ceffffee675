from pathlib import Path

from django.conf import settings
from django.core.management.base import CommandError


def default_q(value):
    return getattr(settings, "QMB_DEFAULT_Q", 0.5) if value is None else value


def write_output(command, text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise CommandError(f"Nao foi possivel escrever {out}: {exc}", returncode=2)
        command.stdout.write(command.style.SUCCESS(f"Saida gravada em {out}."))
    else:
        command.stdout.write(text, ending="")


def input_error(exc: Exception) -> CommandError:
    return CommandError(str(exc), returncode=2)

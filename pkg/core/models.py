from django.db import models
from django.utils import timezone


class VerificationRun(models.Model):
    SERIES_CHOICES = [
        ("one-dim", "Unidimensional"),
        ("pi", "Pi"),
        ("rho12", "Rho12"),
        ("rho1", "Rho1"),
        ("rho2", "Rho2"),
        ("hat-rho", "Hat rho"),
        ("rho-full", "Rho completa"),
    ]

    series = models.CharField(max_length=10, choices=SERIES_CHOICES)
    phases = models.JSONField(default=list, blank=True)
    q_value = models.FloatField()
    cutoff = models.PositiveIntegerField()
    margin = models.PositiveIntegerField()
    passed = models.BooleanField(default=False)
    report = models.JSONField(default=dict, blank=True)
    task_id = models.CharField(max_length=64, blank=True, default="")
    created_at = models.DateTimeField(default=timezone.now)

    class Meta:
        ordering = ["-created_at"]
        indexes = [
            models.Index(fields=["series", "q_value"], name="core_verifi_series_3f1a2b_idx"),
        ]
        verbose_name = "Execucao de verificacao"
        verbose_name_plural = "Execucoes de verificacao"

    def __str__(self):
        status = "ok" if self.passed else "falhou"
        return f"{self.series} q={self.q_value} N={self.cutoff} ({status})"

    @classmethod
    def from_report(cls, report, task_id: str = "") -> "VerificationRun":
        data = report.to_dict()
        return cls.objects.create(
            series=data["series"],
            phases=data["phases"],
            q_value=data["q"],
            cutoff=data["cutoff"],
            margin=data["margin"],
            passed=data["passed"],
            report=data,
            task_id=task_id or "",
        )

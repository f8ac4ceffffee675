from django.contrib import admin

from .models import VerificationRun

admin.site.site_header = "QMatBall Administracao"
admin.site.site_title = "QMatBall Admin"
admin.site.index_title = "Painel de verificacoes"


@admin.register(VerificationRun)
class VerificationRunAdmin(admin.ModelAdmin):
    """
    Execucoes sao geradas pelo comando verify ou pela task; o admin so consulta.
    """

    list_display = ("series", "q_value", "cutoff", "margin", "passed", "created_at")
    list_filter = ("series", "passed")
    search_fields = ("series", "task_id")
    readonly_fields = (
        "series",
        "phases",
        "q_value",
        "cutoff",
        "margin",
        "passed",
        "report",
        "task_id",
        "created_at",
    )

    def has_add_permission(self, request):
        return False

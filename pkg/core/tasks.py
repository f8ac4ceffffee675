import logging

from celery import shared_task

from .models import VerificationRun
from .services.laurent import QDomainError
from .services.representations import SeriesSpecError
from .services.verification import VerificationConfigError, VerificationJob

logger = logging.getLogger(__name__)


@shared_task(bind=True)
def verify_series_job(self, series, phases, q_value, cutoff=None, margin=None, store=True):
    """
    Roda a verificacao de uma serie fora do processo do comando.
    Retorna {"run_id", "passed"}; run_id fica None quando store=False.
    """
    job = VerificationJob(series, tuple(float(phi) for phi in phases or ()), float(q_value), cutoff, margin)
    try:
        report = job.run()
    except (SeriesSpecError, VerificationConfigError, QDomainError) as exc:
        logger.warning("Verification job rejected series=%s: %s", series, exc)
        return {"status": "error", "message": str(exc), "run_id": None, "passed": False}
    except Exception:
        logger.exception("Verification job failed series=%s q=%s", series, q_value)
        raise

    run_id = None
    if store:
        task_id = getattr(self.request, "id", None) or ""
        run_id = VerificationRun.from_report(report, task_id).id
    logger.info("Verification job done series=%s run_id=%s passed=%s", series, run_id, report.passed)
    return {"run_id": run_id, "passed": report.passed}

import os

from celery import Celery


os.environ.setdefault("DJANGO_SETTINGS_MODULE", "qmatball_project.settings")

app = Celery("qmatball_project")
app.config_from_object("django.conf:settings", namespace="CELERY")
app.autodiscover_tasks()

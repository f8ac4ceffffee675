from pathlib import Path

from decouple import config, Csv
from kombu import Queue
import dj_database_url

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Quick-start development settings - unsuitable for production
SECRET_KEY = config('SECRET_KEY', default='django-insecure-qmatball-dev-only')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='127.0.0.1,localhost', cast=Csv())

# Application definition
INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',

    # Local
    'core',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'qmatball_project.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.debug',
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'qmatball_project.wsgi.application'

# Database
# Uses DATABASE_URL from .env
DATABASES = {
    'default': dj_database_url.config(
        default=config('DATABASE_URL', default='sqlite:///db.sqlite3')
    )
}

# Internationalization
LANGUAGE_CODE = 'pt-br'
TIME_ZONE = 'America/Sao_Paulo'
USE_I18N = True
USE_TZ = True

STATIC_URL = '/static/'

# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {'format': '%(asctime)s %(levelname)s %(name)s: %(message)s'},
    },
    'handlers': {
        'console': {'class': 'logging.StreamHandler', 'formatter': 'plain'},
    },
    'root': {
        'handlers': ['console'],
        'level': config('LOG_LEVEL', default='INFO'),
    },
}

# Celery Configuration
CELERY_BROKER_URL = config('CELERY_BROKER_URL', default='redis://localhost:6379/0')
CELERY_RESULT_BACKEND = config('CELERY_RESULT_BACKEND', default='redis://localhost:6379/0')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = TIME_ZONE
CELERY_TASK_DEFAULT_QUEUE = 'celery'
CELERY_TASK_QUEUES = (
    Queue('celery'),
    Queue('verification'),
)
CELERY_TASK_ROUTES = {
    'core.tasks.verify_series_job': {'queue': 'verification'},
}

# Algebra / verification defaults
QMB_DEFAULT_Q = config('QMB_DEFAULT_Q', default=0.5, cast=float)
QMB_Q_GRID = config('QMB_Q_GRID', default='0.3,0.5,0.8', cast=Csv(float))
QMB_DEFAULT_MARGIN = config('QMB_DEFAULT_MARGIN', default=3, cast=int)
QMB_DEFAULT_CUTOFFS = config('QMB_DEFAULT_CUTOFFS', default='20,12,8,6', cast=Csv(int))
QMB_RESIDUAL_TOLERANCE = config('QMB_RESIDUAL_TOLERANCE', default=1e-10, cast=float)
QMB_STRUCTURE_TOLERANCE = config('QMB_STRUCTURE_TOLERANCE', default=1e-14, cast=float)
QMB_COMMUTATOR_TOLERANCE = config('QMB_COMMUTATOR_TOLERANCE', default=1e-12, cast=float)
QMB_ORBIT_SEARCH_BOX = config('QMB_ORBIT_SEARCH_BOX', default=40, cast=int)
QMB_REWRITE_STEP_BUDGET = config('QMB_REWRITE_STEP_BUDGET', default=500000, cast=int)
QMB_VERIFY_WORKERS = config('QMB_VERIFY_WORKERS', default=4, cast=int)

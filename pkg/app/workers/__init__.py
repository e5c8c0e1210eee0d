"""Celery application for ensemble cells."""

from celery import Celery

from app.config import settings

celery_app = Celery(
    "confabulation_workers",
    broker=settings.CELERY_BROKER_URL,
    backend=settings.CELERY_RESULT_BACKEND,
    include=["app.workers.ensemble"],
)

# Celery configuration
celery_app.conf.update(
    task_serializer="json",
    accept_content=["json"],
    result_serializer="json",
    timezone="UTC",
    enable_utc=True,
    task_track_started=True,
    task_always_eager=settings.CELERY_TASK_ALWAYS_EAGER,
    task_eager_propagates=True,
    task_time_limit=6 * 60 * 60,  # long-transient cells
    task_soft_time_limit=5 * 60 * 60,
    worker_prefetch_multiplier=1,
)

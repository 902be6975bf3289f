"""
Configuration utilities for XpookyNet
"""

from .settings import (
    DATAGEN_SETTINGS,
    TRAIN_SETTINGS,
    SWEEP_SETTINGS,
    LOGGING_SETTINGS,
    DEFAULT_OUTPUT_DIR,
    XPOOKY_VERSION,
    get_worker_count,
    validate_environment
)
from .run_config import RunConfig, load_run_config, coerce

__all__ = [
    'DATAGEN_SETTINGS',
    'TRAIN_SETTINGS',
    'SWEEP_SETTINGS',
    'LOGGING_SETTINGS',
    'DEFAULT_OUTPUT_DIR',
    'XPOOKY_VERSION',
    'get_worker_count',
    'validate_environment',
    'RunConfig',
    'load_run_config',
    'coerce'
]

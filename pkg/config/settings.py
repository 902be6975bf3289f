"""
Configuration file for XpookyNet
"""
import os
from typing import Dict

from dotenv import load_dotenv

load_dotenv()

# Dataset generation defaults
DATAGEN_SETTINGS: Dict = {
    'mixture_terms': (1, 10),
    'purity_half_width': 0.02,
    'generator_mode': 'psd-guaranteed',
    'two_qubit_source': 'recipe',
    'retry_budget': 10_000,
    'audit_samples': 100,
}

# Training defaults
TRAIN_SETTINGS: Dict = {
    'lr': 0.01,
    'momentum': 0.9,
    'batch_size': 64,
    'epochs': 20,
    'patience': 2,
    'factor': 0.5,
    'min_lr': 1e-5,
    'min_delta': 1e-4,
    'val_fraction': 0.1,
}

# Sweep defaults
SWEEP_SETTINGS: Dict = {
    'budgets': list(range(1, 16)),
    'trials': 20,
    'purity_targets': [1.0, 0.83, 0.56, 0.37],
    'per_class': 200,
}

LOGGING_SETTINGS: Dict = {
    'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    'level': os.getenv('LOG_LEVEL', 'INFO').upper(),
}

DEFAULT_OUTPUT_DIR = os.getenv('XPOOKY_OUT', 'xpooky_runs')
XPOOKY_VERSION = '0.1.0'


def get_worker_count() -> int:
    """Worker cap from XPOOKY_THREADS (default 1)"""
    raw = os.getenv('XPOOKY_THREADS', '1')
    try:
        workers = int(raw)
    except ValueError:
        raise ValueError(f"XPOOKY_THREADS must be a positive integer, got '{raw}'")
    if workers < 1:
        raise ValueError(f"XPOOKY_THREADS must be a positive integer, got '{raw}'")
    return workers


# Environment validation
def validate_environment():
    """Validate the optional environment overrides"""
    get_worker_count()
    level = os.getenv('LOG_LEVEL', 'INFO').upper()
    if level not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
        raise ValueError(f"LOG_LEVEL '{level}' is not a logging level")
    return True

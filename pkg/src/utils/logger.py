import logging
import os
from typing import Optional

from config.settings import ENV_PREFIX

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# logging.getLevelNamesMapping is 3.11+; on 3.10 use the same mapping it copies
_level_names = getattr(logging, 'getLevelNamesMapping', lambda: dict(logging._nameToLevel))


def _setting(name: str) -> Optional[str]:
    """WLSIM_<NAME> first, then the bare name"""
    return os.getenv(f'{ENV_PREFIX}{name}') or os.getenv(name)


def log_level() -> str:
    level = (_setting('LOG_LEVEL') or 'INFO').upper()
    return level if level in _level_names() else 'INFO'


def get_logger(name: str) -> logging.Logger:
    """Get configured logger (stderr, plus WLSIM_LOG_FILE when set)"""
    logger = logging.getLogger(name)

    if not logger.handlers:
        logger.setLevel(log_level())
        formatter = logging.Formatter(LOG_FORMAT)

        # Console handler
        ch = logging.StreamHandler()
        ch.setFormatter(formatter)
        logger.addHandler(ch)

        log_file = _setting('LOG_FILE')
        if log_file:
            fh = logging.FileHandler(log_file, encoding='utf-8')
            fh.setFormatter(formatter)
            logger.addHandler(fh)
        logger.propagate = False

    return logger

import logging

import numpy as np

from src.utils.logger import get_logger, log_level
from src.utils.seeding import derive_rng


class TestLogger:
    def test_prefixed_level_wins(self, monkeypatch):
        monkeypatch.setenv('WLSIM_LOG_LEVEL', 'debug')
        monkeypatch.setenv('LOG_LEVEL', 'ERROR')
        assert log_level() == 'DEBUG'
        assert get_logger('wlsim.test.prefixed').level == logging.DEBUG

    def test_bare_level_is_fallback(self, monkeypatch):
        monkeypatch.delenv('WLSIM_LOG_LEVEL', raising=False)
        monkeypatch.setenv('LOG_LEVEL', 'warning')
        assert get_logger('wlsim.test.bare').level == logging.WARNING

    def test_unknown_level_defaults_to_info(self, monkeypatch):
        monkeypatch.setenv('WLSIM_LOG_LEVEL', 'chatty')
        assert log_level() == 'INFO'

    def test_log_file(self, monkeypatch, tmp_path):
        path = tmp_path / 'run.log'
        monkeypatch.setenv('WLSIM_LOG_FILE', str(path))
        logger = get_logger('wlsim.test.file')
        logger.warning('⚠️ link dropped')
        for handler in logger.handlers:
            handler.flush()
        assert 'link dropped' in path.read_text(encoding='utf-8')
        assert not logger.propagate


class TestSeeding:
    def test_keys_separate_streams(self):
        a = derive_rng(0, 'channel', 1).random(4)
        b = derive_rng(0, 'channel', 2).random(4)
        assert not np.array_equal(a, b)

    def test_same_keys_same_stream(self):
        np.testing.assert_array_equal(derive_rng(3, 'init').random(4), derive_rng(3, 'init').random(4))

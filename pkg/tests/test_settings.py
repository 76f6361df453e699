import logging

import numpy as np

from src.config.settings import get_settings, override_settings
from src.core.spectral import slice_spectra
from src.utils.helpers import format_float, map_slices
from src.utils.logger import setup_logger
from tests.helpers import random_tensor


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("MLTI_MAX_WORKERS", "3")
    monkeypatch.setenv("MLTI_LOG_LEVEL", "debug")
    settings = get_settings(reload=True)
    assert settings.max_workers == 3
    assert settings.log_level == "DEBUG"
    assert settings.rank_tol == 1e-10


def test_override_is_process_wide():
    override_settings(rank_tol=1e-6)
    assert get_settings().rank_tol == 1e-6
    assert get_settings(reload=True).rank_tol == 1e-10


def test_map_slices_keeps_order():
    assert map_slices(lambda i: i * i, range(8), max_workers=4) == [i * i for i in range(8)]
    assert map_slices(lambda i: i, [], max_workers=4) == []


def test_threaded_spectra_match_sequential(rng):
    a = random_tensor(rng, 4, 4, 7)
    sequential = slice_spectra(a)
    override_settings(max_workers=4)
    np.testing.assert_array_equal(slice_spectra(a), sequential)


def test_setup_logger_does_not_stack_handlers(tmp_path):
    setup_logger(level="INFO")
    logger = setup_logger(level="DEBUG", log_dir=str(tmp_path))
    assert len(logger.handlers) == 2
    assert logger.handlers[0].level == logging.DEBUG
    assert list(tmp_path.glob("mlti_*.log"))


def test_format_float_negative_zero():
    assert format_float(-0.0) == format_float(0.0)

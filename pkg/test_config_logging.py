"""
Tests for configuration loading, logging and profiling.
"""

from mpmath import mp

from config.config_manager import (
    ConfigManager, get_config, get_config_section, set_config,
)
from utils.logger import get_logger, setup_logging
from utils.numerics import precision_tolerance, strip_grid, working_bits
from utils.performance import PerformanceProfiler, profile_operation


def test_defaults_from_ini():
    assert get_config('Precision', 'precision_bits') == 64
    assert get_config('Verification', 'tolerance') == 1e-8
    assert get_config('Logging', 'file_output') is False
    assert get_config('Output', 'format') == 'json'
    assert get_config('Nope', 'missing', 'fallback') == 'fallback'


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("HECKE_RPF_PRECISION", "128")
    monkeypatch.setenv("HECKE_RPF_TOLERANCE", "1e-10")
    monkeypatch.setenv("HECKE_RPF_MAX_DEPTH_FACTOR", "6")
    assert get_config('Precision', 'precision_bits') == 128
    assert get_config('Verification', 'tolerance') == 1e-10
    assert get_config('Enumeration', 'depth_factor') == 6


def test_bad_environment_value_falls_back(monkeypatch):
    monkeypatch.setenv("HECKE_RPF_SEED", "not-a-number")
    assert get_config('Verification', 'rng_seed') == 0


def test_set_config_is_typed():
    set_config('Verification', 'sample_count', 7)
    assert get_config('Verification', 'sample_count') == 7
    section = get_config_section('Quadrature')
    assert section['max_degree'] == 8
    assert section['guard_bits'] == 20
    assert section['invmellin_truncation'] == 60.0


def test_missing_file_is_created(tmp_path):
    path = tmp_path / "fresh.ini"
    manager = ConfigManager(str(path))
    assert path.exists()
    assert manager.get('Enumeration', 'max_nodes') == 250000
    assert set(manager.get_all_config()) >= {'Precision', 'Verification', 'Logging'}


def test_check_events_are_logged(capsys):
    setup_logging("DEBUG", console_output=True)
    log = get_logger("unit")
    log.check_event("demo", b=2, a=1)
    log.performance("step", 0.25)
    err = capsys.readouterr().err
    assert "CHECK | demo | a=1 b=2" in err
    assert "PERFORMANCE | step | 0.250s" in err
    assert "hecke_rpf.unit" in err


def test_quiet_console_level(capsys):
    setup_logging("ERROR", console_output=True)
    get_logger("unit").info("hidden")
    get_logger("unit").error("shown")
    err = capsys.readouterr().err
    assert "hidden" not in err
    assert "shown" in err


def test_profiler_records_history():
    with PerformanceProfiler("unit-block") as prof:
        sum(range(1000))
    assert prof.get_duration() >= 0
    assert PerformanceProfiler.history[-1].name == "unit-block"

    @profile_operation("unit-decorated")
    def work(x):
        return x * 2

    assert work(21) == 42
    assert PerformanceProfiler.history[-1].name == "unit-decorated"


def test_extended_precision_switch():
    assert working_bits(3, 64, 128, 5) == 64
    assert working_bits(5, 64, 128, 5) == 128
    assert working_bits(7, 256, 128, 5) == 256


def test_precision_tolerance_follows_working_precision():
    with mp.workprec(53):
        assert precision_tolerance() == 2.0 ** -33
    with mp.workprec(128):
        assert precision_tolerance() == 2.0 ** -108
        assert precision_tolerance(40) == 2.0 ** -88


def test_strip_grid_is_seeded():
    first = strip_grid(3, 10, seed=4)
    assert first == strip_grid(3, 10, seed=4)
    assert all(0 < s.real < 6 and abs(s.real - round(s.real)) >= 0.05 for s in first)

"""
Shared pytest setup: puts ``app/`` on the import path, registers the
hypothesis profiles and provides the bundled spec files as fixtures.
"""

import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

ROOT = Path(__file__).parent
sys.path.insert(0, str(ROOT / "app"))

from config.config_manager import reset_config_manager  # noqa: E402

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("default")

SPECS_DIR = ROOT / "specs"


@pytest.fixture(autouse=True)
def fresh_config():
    """Each test sees the INI file and environment, not a previous test's set_config calls"""
    reset_config_manager()
    yield
    reset_config_manager()


@pytest.fixture
def specs_dir() -> Path:
    return SPECS_DIR


@pytest.fixture
def load_spec_file():
    import json
    from analysis.rpf import RpfSpec

    def load(name: str, **kwargs):
        return RpfSpec.from_json(json.loads((SPECS_DIR / name).read_text()), **kwargs)

    return load

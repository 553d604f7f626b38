import pytest
from pydantic import ValidationError

from diffcipher.core.settings import DiffCipherSettings


def test_defaults():
    settings = DiffCipherSettings()
    assert settings.term_cap == 2**20
    assert settings.cnf_cut_width == 4
    assert settings.keystream_bits == 190
    assert settings.bit_order == "msb"
    assert settings.log_level == "WARNING"
    assert settings.budget_ms is None


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("DIFFCIPHER_THREADS", "4")
    monkeypatch.setenv("DIFFCIPHER_LOG_LEVEL", "debug")
    monkeypatch.setenv("DIFFCIPHER_BIT_ORDER", "lsb")
    settings = DiffCipherSettings()
    assert settings.threads == 4
    assert settings.log_level == "DEBUG"
    assert settings.bit_order == "lsb"


@pytest.mark.parametrize(
    "overrides",
    [
        {"cnf_cut_width": 2},
        {"threads": 0},
        {"bit_order": "middle"},
        {"guess_timeout_factor": 1.0},
        {"budget_ms": 10, "guess_timeout_floor_ms": 100},
    ],
)
def test_invalid_values_are_rejected(overrides):
    with pytest.raises(ValidationError):
        DiffCipherSettings(**overrides)


def test_with_overrides_skips_none_and_revalidates():
    base = DiffCipherSettings(seed=3)
    updated = base.with_overrides(seed=None, threads=2, guess_timeout_floor_ms=0)
    assert updated.seed == 3
    assert updated.threads == 2
    assert updated.guess_timeout_floor_ms == 0
    with pytest.raises(ValidationError):
        base.with_overrides(cnf_cut_width=40)

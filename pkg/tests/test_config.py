import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from puzzlekey.config import (
    ConfigError,
    ExperimentConfig,
    load_config,
    parse_config,
    replace_fields,
)


def test_defaults_valid():
    cfg = parse_config("")
    assert cfg == ExperimentConfig()
    assert cfg.movement.period_packets == 10
    assert cfg.bearings_deg == [0, 60, 120, 180, 240, 300]


def test_parse_values():
    cfg = parse_config("seed: 4\nsnr_db: 15\nm_values: [4, 7]\nsteady_level: 0\npsd_method: periodogram\n")
    assert cfg.seed == 4 and cfg.snr_db == 15.0 and isinstance(cfg.snr_db, float)
    assert cfg.m_values == (4, 7)
    assert cfg.steady_level == 0.0
    assert cfg.psd_method == "periodogram"


def test_exponent_float():
    assert parse_config("asbg_alpha: 1e-3\n").asbg_alpha == 1e-3


@pytest.mark.parametrize(
    "text, line, key",
    [
        ("seed: 1\nbogus: 3\n", 2, "bogus"),
        ("seed: 1\n\nn_packets: 0\n", 3, "n_packets"),
        ("n_taps: 2.5\n", 1, "n_taps"),
        ("seed: true\n", 1, "seed"),
        ("snr_db: 20\nn_bins: 100\n", 2, "n_bins"),
        ("m_values: [4, 40]\n", 1, "m_values"),
        ("movement_duty: 1.0\n", 1, "movement_duty"),
        ("seed: 1\nseed: 2\n", 2, "seed"),
        ("span: 0.01\n", 1, "span"),
    ],
)
def test_line_precise_errors(text, line, key):
    with pytest.raises(ConfigError) as ei:
        parse_config(text)
    assert ei.value.line == line and ei.value.key == key
    assert str(ei.value).startswith(f"line {line}: {key}:")


def test_not_a_mapping():
    with pytest.raises(ConfigError, match="mapping"):
        parse_config("- 1\n- 2\n")


def test_malformed_yaml():
    with pytest.raises(ConfigError, match="line"):
        parse_config("seed: [1, 2\n")


def test_yaml_roundtrip_digest(tmp_path):
    cfg = replace_fields(ExperimentConfig(), seed=9, asbg_alpha=1e-5, steady_level=0.25)
    p = tmp_path / "c.yaml"
    p.write_text(cfg.to_yaml())
    again = load_config(p)
    assert again == cfg
    assert again.digest() == cfg.digest()


@settings(max_examples=50, deadline=None)
@given(
    st.integers(0, 2**31),
    st.floats(-10, 60, allow_nan=False),
    st.lists(st.integers(1, 36), min_size=1, max_size=5),
    st.floats(1e-9, 10),
)
def test_roundtrip_property(seed, snr, ms, alpha):
    cfg = replace_fields(ExperimentConfig(), seed=seed, snr_db=snr, m_values=ms, asbg_alpha=alpha)
    assert parse_config(cfg.to_yaml()) == cfg


def test_replace_skips_none():
    cfg = replace_fields(ExperimentConfig(), seed=None, n_packets=3)
    assert cfg.seed == 0 and cfg.n_packets == 3


def test_digest_changes():
    assert ExperimentConfig().digest() != replace_fields(ExperimentConfig(), seed=1).digest()

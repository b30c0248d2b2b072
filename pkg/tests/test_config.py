import pytest

from sprays.config import Config, Settings, load_config


def test_defaults():
    c = Config()
    assert c.log_level == "info"
    s = c.settings
    assert s.zero_tol == 1e-9
    assert s.height == 200.0
    assert s.delta == 1.0
    assert s.max_denominator == 64
    assert s.path_cap == 10**8
    assert s.collapse is True
    assert s.method == "auto"


def test_load_missing_file(tmp_path):
    c = load_config(tmp_path / "nope.toml")
    assert c == Config()


def test_load_from_file(tmp_path):
    toml = tmp_path / "sprays.toml"
    toml.write_text(
        '[sprays]\nlog_level = "debug"\n\n[sprays.settings]\nheight = 50.0\nworkers = 4\n'
    )
    c = load_config(toml)
    assert c.log_level == "debug"
    assert c.settings.height == 50.0
    assert c.settings.workers == 4
    assert c.settings.zero_tol == 1e-9  # default preserved


def test_malformed_toml_exits(tmp_path):
    toml = tmp_path / "sprays.toml"
    toml.write_text("this is not valid toml [[[")
    with pytest.raises(SystemExit):
        load_config(toml)


def test_empty_section(tmp_path):
    toml = tmp_path / "sprays.toml"
    toml.write_text("[sprays]\n")
    assert load_config(toml) == Config()


def test_unknown_keys_ignored(tmp_path):
    """Extra keys don't crash, they're just ignored."""
    toml = tmp_path / "sprays.toml"
    toml.write_text('[sprays]\ntypo_key = "oops"\n\n[sprays.settings]\nhieght = 3.0\n')
    c = load_config(toml)
    assert c.settings == Settings()


def test_merge_precedence():
    base = Settings().merged({"height": 100.0, "workers": 2})
    final = base.merged({"height": 30.0, "workers": None, "collapse": False})
    assert final.height == 30.0
    assert final.workers == 2
    assert final.collapse is False


def test_merge_coerces_types():
    s = Settings().merged({"height": 20, "max_denominator": 32.0})
    assert isinstance(s.height, float)
    assert s.max_denominator == 32

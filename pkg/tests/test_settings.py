import pytest

from polar_lab.errors import ConfigError
from polar_lab.settings import LabSettings


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults_resolve_relative_to_the_settings_dir(tmp_path):
    settings = LabSettings.from_dict({}, settings_dir=tmp_path / "settings")
    root = tmp_path.resolve()
    assert settings.experiments_dir == root / "settings" / "experiments"
    assert settings.output_dir == root / "results"
    assert settings.threads == 1
    assert settings.chunk_size == 16
    assert settings.tolerances == {}
    assert settings.section("lab")["id"] == "polar-lab"


def test_yaml_values_override_the_defaults(tmp_path):
    path = write(
        tmp_path / "conf" / "settings.yml",
        "runner:\n"
        "  threads: 3\n"
        "project:\n"
        "  output_dir: ${project_root}/out\n"
        "tolerances:\n"
        "  audit: 1.0e-6\n",
    )
    settings = LabSettings.load(path)
    assert settings.source == path
    assert settings.threads == 3
    assert settings.chunk_size == 16
    assert settings.output_dir == tmp_path.resolve() / "out"
    assert settings.tolerances == {"audit": 1e-6}


def test_settings_path_from_the_environment(tmp_path, monkeypatch):
    path = write(tmp_path / "settings.yml", "runner:\n  chunk_size: 4\n")
    monkeypatch.setenv("LAB_SETTINGS", str(path))
    assert LabSettings.load().chunk_size == 4


@pytest.mark.parametrize("text", ["runner: [1\n", "- 1\n- 2\n"])
def test_malformed_settings(tmp_path, text):
    path = write(tmp_path / "settings.yml", text)
    with pytest.raises(ConfigError):
        LabSettings.load(path)


def test_missing_explicit_settings_file(tmp_path):
    with pytest.raises(ConfigError):
        LabSettings.load(tmp_path / "nowhere.yml")


def test_shipped_settings(monkeypatch):
    monkeypatch.delenv("LAB_SETTINGS", raising=False)
    settings = LabSettings.load()
    assert settings.section("lab")["id"] == "polar-lab"
    assert (settings.experiments_dir / "lower-cone.json").is_file()


def test_non_mapping_section_is_rejected(tmp_path):
    settings = LabSettings.from_dict(
        {"charts": "on"}, settings_dir=tmp_path
    )
    with pytest.raises(ConfigError):
        settings.section("charts")

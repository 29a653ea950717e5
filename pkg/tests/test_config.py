import pytest

from otscontract.config import ENV_VAR, Config, ConfigError, load_config, parse_config
from otscontract.interpreter import DomainBounds

from conftest import CORPUS_CONFIG


def test_defaults(monkeypatch):
    monkeypatch.delenv(ENV_VAR, raising=False)
    cfg = load_config()
    assert cfg == Config()
    assert cfg.bounds == DomainBounds() and cfg.format == "java-jml"
    assert not cfg.implicit_stutter


def test_corpus_config():
    cfg = load_config(CORPUS_CONFIG)
    assert cfg.implicit_stutter
    assert cfg.method_names["ACCOUNT.read"] == "balance"
    names = cfg.translation_options().names
    assert names.getter("ACCOUNT-SYSTEM", "account") == "getAcc"


def test_environment_variable(monkeypatch):
    monkeypatch.setenv(ENV_VAR, str(CORPUS_CONFIG))
    assert load_config().implicit_stutter


def test_full_document(tmp_path):
    data = {
        "implicit_stutter": True, "ghost": "pre", "format": "json", "output_dir": "out",
        "class_names": {"ACCOUNT": "Acct"},
        "sort_mapping": {"Money": {"type": "long", "default": "0L"}, "Tag": "String"},
        "bounds": {"int_range": [-1, 1], "id_range": [0, 4], "max_rewrite_steps": 50},
    }
    cfg = parse_config(data, tmp_path)
    assert cfg.output_dir == tmp_path / "out"
    assert cfg.bounds == DomainBounds((-1, 1), (0, 4), 50)
    assert cfg.sort_mapping["Money"].default == "0L"
    assert cfg.sort_mapping["Tag"].default == "null"
    opts = cfg.translation_options()
    assert opts.names.ghost == "pre" and opts.names.class_name("ACCOUNT") == "Acct"
    assert opts.mapping.lookup("Money").type == "long"
    assert opts.mapping.lookup("Int").type == "int"


@pytest.mark.parametrize("data", [
    {"colour": 1},
    {"implicit_stutter": "yes"},
    {"ghost": "not an identifier"},
    {"format": "xml"},
    {"method_names": {"A.b": 3}},
    {"sort_mapping": {"X": {"default": "0"}}},
    {"bounds": {"int_range": [3, 1]}},
    {"bounds": {"int_range": [1]}},
    {"bounds": {"fuel": 3}},
    {"bounds": {"max_rewrite_steps": 0}},
])
def test_rejects_bad_documents(data):
    with pytest.raises(ConfigError):
        parse_config(data)


def test_unreadable_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("implicit_stutter = \n")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_relative_output_dir_is_resolved_against_config(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text('output_dir = "gen"\n')
    assert load_config(path).output_dir == tmp_path / "gen"

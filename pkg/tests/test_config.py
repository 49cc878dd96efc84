import pytest

from podrom.fem1d import SpaceTag
from podrom.experiments.config import ConfigError, load_config, make_config, parse_list, parse_number, validate


def test_parse_numbers():
    assert parse_number("1/16") == 0.0625
    assert parse_number(0.5) == 0.5
    assert parse_list("1/4, 1/8") == [0.25, 0.125]
    assert parse_list([1, "1/2"]) == [1.0, 0.5]
    with pytest.raises(ConfigError):
        parse_number("abc")


def test_load_and_override(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("example: cex1\nk: 8\ndt_list: [1/2, 1/4]\nspace: h1\ndq: true\n")
    c = load_config(path)
    assert c.k == 8 and c.dt_list == [0.5, 0.25] and c.space is SpaceTag.H10 and c.dq is True
    c = load_config(path, {"k": 128, "dt_list": "1/128", "space": None})
    assert c.k == 128 and c.dt_list == [1 / 128] and c.space is SpaceTag.H10


def test_defaults_then_file_then_overrides(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("h: 1/64\n")
    assert load_config(None, None, {"h": "1/256"}).h == 1 / 256
    assert load_config(path, None, {"h": "1/256"}).h == 1 / 64
    assert load_config(path, {"h": "1/32"}, {"h": "1/256"}).h == 1 / 32


def test_rejects_unknown_and_nested(tmp_path):
    with pytest.raises(ConfigError, match="unknown"):
        make_config({"bogus": 1})
    path = tmp_path / "c.yaml"
    path.write_text("example: cex1\nnested: {a: 1}\n")
    with pytest.raises(ConfigError):
        load_config(path)


@pytest.mark.parametrize("k,dt", [(128, 1 / 3), (128, 1 / 256), (100, 0.003), (8, 1 / 16)])
def test_grid_constraint_message(k, dt):
    with pytest.raises(ConfigError, match="Dirichlet"):
        validate(make_config({"example": "cex1", "k": k, "dt_list": [dt]}))


def test_other_validation():
    validate(make_config({"example": "cex1", "k": 128, "T": 1, "dt_list": [1 / 4, 1 / 128]}))
    with pytest.raises(ConfigError):
        validate(make_config({"example": "cex1", "T": 1, "dt_list": [0.3]}))
    with pytest.raises(ConfigError):
        validate(make_config({"example": "nope"}))
    with pytest.raises(ConfigError):
        validate(make_config({"format": "xlsx"}))
    with pytest.raises(ConfigError):
        validate(make_config({"r_list": [0, 1]}))
    with pytest.raises(ConfigError):
        validate(make_config({"h": 0.3}))
    with pytest.raises(ConfigError):
        validate(make_config({"nu": -1}))


def test_snapshot_is_serializable():
    import json

    snap = make_config({"dt_list": "1/4"}).snapshot()
    assert json.loads(json.dumps(snap))["space"] == "l2"

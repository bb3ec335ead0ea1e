import json

import pytest

from podles.cli import COMMANDS, RunConfig, build_config, main, make_parser


def run_cli(args):
    return main(args)


SMALL = ["--q", "0.5", "--a", "0.3", "--precision", "128", "--nmax", "2",
         "--gram-n", "2", "--theta-grid", "8"]


@pytest.mark.parametrize("command", sorted(COMMANDS))
def test_commands_run_and_exit_zero(tmp_path, capsys, command):
    code = run_cli([command, *SMALL, "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0, out
    assert '"status": "ok"' in out
    assert any(tmp_path.iterdir())


@pytest.mark.parametrize("command", sorted(COMMANDS))
def test_determinism_byte_identical(tmp_path, capsys, command):
    d1 = tmp_path / "run1"
    d2 = tmp_path / "run2"
    assert run_cli([command, *SMALL, "--out", str(d1)]) == 0
    assert run_cli([command, *SMALL, "--out", str(d2)]) == 0
    capsys.readouterr()
    files1 = sorted(p.name for p in d1.iterdir())
    files2 = sorted(p.name for p in d2.iterdir())
    assert files1 == files2 and files1
    for name in files1:
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_json_format(tmp_path, capsys):
    code = run_cli(["genfun", *SMALL, "--format", "json", "--out", str(tmp_path)])
    capsys.readouterr()
    assert code == 0
    data = json.loads((tmp_path / "genfun.json").read_text())
    assert data["schema"] == "genfun/1"
    assert data["rows"][0]["lambda_n"].startswith("0.0")


def test_csv_header_block(tmp_path, capsys):
    run_cli(["genfun", *SMALL, "--out", str(tmp_path)])
    capsys.readouterr()
    text = (tmp_path / "genfun.csv").read_text().splitlines()
    assert text[0] == "#schema=genfun/1"
    assert text[1].startswith("#tool=podles ")
    assert any(line.startswith("#q=0.5") for line in text)
    header_end = max(i for i, line in enumerate(text) if line.startswith("#"))
    assert text[header_end + 1].split(",")[0] == "n"


def test_config_file_flags_win(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("q=0.4\nn_max=1\nprecision_bits=128\n")
    parser = make_parser()
    args = parser.parse_args(["genfun", "--config", str(cfg), "--q", "0.5"])
    rc = build_config(args)
    assert rc.q == "0.5"        # flag wins
    assert rc.n_max == 1        # file applies
    assert rc.precision_bits == 128


def test_invalid_q_rejected():
    with pytest.raises(ValueError):
        RunConfig(q="1.7").context()


def test_classification_range_warns():
    with pytest.warns(UserWarning):
        RunConfig(a="0.9", precision_bits=128).context()

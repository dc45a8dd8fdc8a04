import json
import os

import numpy as np
import pytest

from spdcmodes import __version__
from spdcmodes.cli import main
from spdcmodes.io import ConfigError, format_value, parse_config, write_csv


def run(tmp_path, name, sub, config, *extra):
    cfg = tmp_path / f"{name}.json"
    cfg.write_text(json.dumps(config) if not isinstance(config, str) else config)
    out = tmp_path / name
    code = main([sub, "--config", str(cfg), "--out", str(out), *extra])
    return code, out


def read_csv(path):
    lines = path.read_text().splitlines()
    meta = dict(line[2:].split("=", 1) for line in lines if line.startswith("# "))
    body = [line for line in lines if not line.startswith("#")]
    cols = body[0].split(",")
    data = np.array([[float(v) if v else np.nan for v in row.split(",")] for row in body[1:]])
    return meta, cols, data


def test_minimal_config_gets_default_grids():
    opts = parse_config('{"source": {"xi": 2.8}}')
    g = opts.tree["source"]["omega_grid"]
    assert (g["start"], g["stop"], g["step"]) == (-406.12, 59.14, 1.6)
    assert opts.tree["sweep"]["log_xi"] == [-2.0, 1.0]
    assert parse_config('{"source": {"xi": 2.8}}', "paper").tree["sweep"]["step"] == 0.05
    grid = opts.source.omega_grid
    # the range is not a whole number of steps; the last node stays inside it
    assert grid[0] == -406.12 and 59.14 - 1.6 < grid[-1] <= 59.14
    assert grid.size == 291
    gauss = parse_config('{"source": {"xi": 1, "poling": "gaussian"}}')
    assert gauss.tree["sweep"]["log_xi"] == [-2.2, 0.8]


def test_duplicate_and_unknown_keys():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config('{"source": {"xi": 1, "xi": 2}}')
    with pytest.raises(ConfigError, match="unknown key 'source.waist'"):
        parse_config('{"source": {"waist": 1e-4}}')
    with pytest.raises(ConfigError, match="unknown key 'colour'"):
        parse_config('{"colour": 1}')
    with pytest.raises(ConfigError, match="malformed"):
        parse_config('{"source": ')
    with pytest.raises(ConfigError, match="xi"):
        parse_config('{"source": {"xi": -1}}')
    with pytest.raises(ConfigError, match="preset"):
        parse_config("{}", "huge")


def test_hash_ignores_comments_and_whitespace():
    a = parse_config('{"source": {"xi": [1, 2, 2]}, "filter": {"kind": "none"}}')
    b = parse_config('# focused\n{\n  "filter": {"kind":"none"},\n  // pump\n  "source": {"xi": [1.0, 2, 2.0]}\n}\n')
    c = parse_config('{"source": {"xi": [1, 2, 2.5]}}')
    assert a.config_hash == b.config_hash != c.config_hash
    assert a.config_hash != parse_config('{"source": {"xi": [1, 2, 2]}}', "paper").config_hash


def test_format_value_round_trips():
    for v in (0.1, 1 / 3, 1e-300, -2.5e17, 7.006277):
        assert float(format_value(v)) == v
    assert format_value(np.float64(0.1)) == "0.1"
    assert format_value(None) == "" and format_value(True) == "true" and format_value(3) == "3"


def test_csv_header(tmp_path):
    write_csv(tmp_path / "t.csv", ["a", "b"], [(1, 0.5)], {"config_hash": "abc"})
    text = (tmp_path / "t.csv").read_text()
    assert text == f"# config_hash=abc\n# tool=spdcmodes\n# version={__version__}\na,b\n1,0.5\n"


def test_spectrum_peak_shift(tmp_path):
    fine = {"start": -30.0, "stop": 25.0, "step": 0.05}
    code_f, focused = run(tmp_path, "f", "spectrum", {"source": {"xi": 2.8, "omega_grid": fine}})
    code_p, plane = run(tmp_path, "p", "spectrum", {"source": {"xi": 0.02, "omega_grid": fine}})
    assert code_f == code_p == 0
    meta, cols, f = read_csv(focused / "spectrum.csv")
    _, _, p = read_csv(plane / "spectrum.csv")
    assert meta["config_hash"] and meta["preset"] == "desk" and meta["version"] == __version__
    k = cols.index("P_0_0")
    x = f[:, 0]
    peak_f, peak_p = x[np.argmax(f[:, k])], x[np.argmax(p[:, k])]
    assert abs(peak_f - peak_p) > 1.0

    def lobe_asymmetry(dens):
        # left vs right mass within 8 units of the peak
        k = int(np.argmax(dens))
        left = dens[(x >= x[k] - 8) & (x < x[k])].sum()
        right = dens[(x > x[k]) & (x <= x[k] + 8)].sum()
        return abs(left - right) / (left + right)

    assert lobe_asymmetry(f[:, k]) > 4 * lobe_asymmetry(p[:, k])
    for name in ("amplitudes.csv", "efficiency.csv"):
        assert (focused / name).exists()


@pytest.mark.parametrize("sub,config", [
    ("spectrum", {"source": {"xi": [1.0, 2.0, 2.0]}, "filter": {"kind": "rect", "width": 20}}),
    ("overlap", {"source": {"xi": 2.0, "p_max": 2}}),
    ("sweep", {"source": {"matching": "type0"}, "sweep": {"log_xi": [0.0, 0.6], "step": 0.2,
                                                          "phi_values": [0.875, 1.125]}}),
    ("tradeoff", {"sweep": {"log_xi": [-1.0, 1.0]}}),
    ("fit", {"sweep": {"log_xi": [-1.0, 1.0]}}),
    ("purity", {"source": {"matching": "sgvm", "poling": "gaussian", "xi": 0.006},
                "purity": {"n_grid": 64, "dump_jsa": True}}),
    ("scaling", {"source": {"xi": 1.0}, "scaling": {"filtered": True}}),
])
def test_rerun_is_byte_identical(tmp_path, sub, config):
    code1, out1 = run(tmp_path, "a", sub, config, "--threads", "1")
    code2, out2 = run(tmp_path, "b", sub, config, "--threads", "3")
    assert code1 == code2 == 0
    files = sorted(os.listdir(out1))
    assert files and files == sorted(os.listdir(out2))
    for name in files:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        text = (out1 / name).read_text()
        assert "config_hash" in text and __version__ in text


def test_sweep_output_max_B_is_one(tmp_path):
    code, out = run(tmp_path, "s", "sweep", {"sweep": {"log_xi": [-1.0, 1.0]}})
    assert code == 0
    _, cols, data = read_csv(out / "sweep.csv")
    B = data[:, cols.index("B")]
    assert B.max() == 1.0 and np.count_nonzero(B == 1.0) == 1
    summary = json.loads((out / "sweep_summary.json").read_text())
    assert summary["result"]["argmax"]["B"] == 1.0


def test_error_records(tmp_path, capsys):
    code, out = run(tmp_path, "bad", "sweep", '{"source": {"xi": 1, "xi": 2}}')
    assert code == 2
    rec = json.loads((out / "error.json").read_text())
    assert rec["status"] == "error" and rec["kind"] == "config" and "duplicate" in rec["message"]
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1]) == rec

    code, out = run(tmp_path, "comp", "purity", {"source": {"matching": "type2"}})
    assert code == 1
    rec = json.loads((out / "error.json").read_text())
    assert rec["kind"] == "computation" and rec["error_type"] == "MatchingTypeError"

    code, out = run(tmp_path, "empty", "spectrum",
                    {"filter": {"kind": "rect", "width": 1.0, "center": 5000.0}})
    assert code == 1
    assert json.loads((out / "error.json").read_text())["error_type"] == "EmptySupportError"

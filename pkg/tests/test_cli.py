import csv
import json
import math
from types import SimpleNamespace

import numpy as np
import pytest

from equiripple.bands import BandSystem
from equiripple.cli import dumps, main, sample_rows


@pytest.fixture(scope="module")
def forward_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "forward.json"
    rc = main(["forward", "--family", "Genus2Stiefel", "--t", "0.5", "--n", "3", "--m", "1",
               "--h", "0.2", "--v", "1", "--out", str(path)])
    assert rc == 0
    return path


def test_forward_output(forward_file):
    d = json.loads(forward_file.read_text())
    assert d["verification"]["alternation_count"] == 8
    assert set(d) == {"solution", "bands", "verification"}
    assert d["solution"]["family"] == "Genus2Stiefel"


@pytest.mark.parametrize("argv", [
    ["forward", "--family", "Genus2Stiefel", "--t", "0.4", "--n", "5", "--m", "7", "--h", "0.3", "--v", "2"],
    ["forward", "--family", "Genus2Stiefel", "--t", "0.4", "--n", "1", "--m", "1", "--h", "0.3", "--v", "1"],
    ["forward", "--family", "Genus2Stiefel", "--t", "0.4", "--n", "5", "--m", "2", "--h", "0.3"],
    ["forward", "--family", "Nope", "--t", "0.4", "--n", "5", "--m", "2"],
    ["forward", "--t", "abc"],
    [],
])
def test_bad_flags(argv, capsys):
    assert main(argv) == 64
    assert "usage" in capsys.readouterr().err


def _bands_file(tmp_path, forward_file):
    d = json.loads(forward_file.read_text())
    path = tmp_path / "bands.json"
    path.write_text(json.dumps({"bands": d["bands"]}))
    return path


def test_design_round_trip(tmp_path, forward_file):
    out = tmp_path / "design.json"
    rc = main(["design", "--bands", str(_bands_file(tmp_path, forward_file)), "--n", "3",
               "--sigma", "1,0,0", "--out", str(out)])
    assert rc == 0
    d = json.loads(out.read_text())
    assert d["family"] == "Genus2Stiefel"
    assert d["params"]["h"] == pytest.approx(0.2, rel=1e-6)


def test_design_input_errors(tmp_path, forward_file):
    bands = _bands_file(tmp_path, forward_file)
    assert main(["design", "--bands", str(bands), "--n", "3", "--sigma", "1,1,0"]) == 64
    overlap = tmp_path / "overlap.json"
    overlap.write_text(json.dumps({"bands": {"e_minus": [-3, 0], "e1_plus": [-1, 2], "e2_plus": [3, 4]}}))
    assert main(["design", "--bands", str(overlap), "--n", "3", "--sigma", "1,0,0"]) == 65
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["design", "--bands", str(broken), "--n", "3", "--sigma", "1,0,0"]) == 65
    assert main(["design", "--bands", str(tmp_path / "absent.json"), "--n", "3", "--sigma", "1,0,0"]) == 66


def test_design_no_family(tmp_path, forward_file):
    out = tmp_path / "none.json"
    rc = main(["design", "--bands", str(_bands_file(tmp_path, forward_file)), "--n", "4",
               "--sigma", "0,0,0", "--out", str(out)])
    assert rc == 3


def test_verify_and_oracle(tmp_path, forward_file):
    out = tmp_path / "verify.json"
    assert main(["verify", str(forward_file), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["verification"]["alternation_count"] == 8
    out = tmp_path / "oracle.json"
    assert main(["oracle", str(forward_file), "--out", str(out)]) == 0
    cmp = json.loads(out.read_text())["comparison"]
    assert cmp["local_opt"] and cmp["consistent"]


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_samples_format(tmp_path, forward_file):
    out = tmp_path / "two.csv"
    assert main(["samples", str(forward_file), "--count", "2", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "x,R,S_E,in_band"
    assert len(_read_csv(out)) == 2
    out = tmp_path / "many.csv"
    assert main(["samples", str(forward_file), "--count", "3000", "--out", str(out)]) == 0
    rows = _read_csv(out)
    x = np.array([float(r["x"]) for r in rows])
    assert np.all(np.diff(x) > 0)
    bands = json.loads(forward_file.read_text())["bands"]
    lo, hi = bands["e_minus"][0], bands["e2_plus"][1]
    assert x[0] == pytest.approx(lo - 0.2 * (hi - lo)) and x[-1] == pytest.approx(hi + 0.2 * (hi - lo))
    assert main(["samples", str(tmp_path / "absent.json")]) == 66


def test_samples_show_zolotarev_oscillations(tmp_path):
    sol_path = tmp_path / "g1.json"
    assert main(["forward", "--family", "Genus1Zolotarev", "--t", "0.4", "--n", "4", "--m", "1",
                 "--v1", "1.3", "--v2", "1.7", "--out", str(sol_path)]) == 0
    out = tmp_path / "g1.csv"
    assert main(["samples", str(sol_path), "--count", "20000", "--out", str(out)]) == 0
    rows = _read_csv(out)
    stop = np.array([float(r["R"]) for r in rows if r["S_E"] == "-1"])
    # interior extrema plus the two endpoints
    touches = np.count_nonzero(np.diff(np.sign(np.diff(stop))) != 0) + 2
    assert touches - 1 == 4


def test_pole_rows_are_blank(tmp_path):
    bands = BandSystem((-3.0, -1.0), (1.0, 2.0), (3.0, 4.0))
    stub = SimpleNamespace(user_bands=bands,
                           approximant=lambda x: np.where(np.asarray(x) > 5.0, np.inf, x))
    rows = sample_rows(stub, 9)
    assert [r[1] is None for r in rows] == [r[0] > 5.0 for r in rows]
    assert any(r[1] is None for r in rows)


def test_json_seventeen_digits():
    text = dumps({"a": 0.1, "b": [1.0, 2, None, True], "c": math.inf})
    assert '"a": 0.10000000000000001' in text
    assert '1.0' in text and 'Infinity' in text
    back = json.loads(text)
    assert back["a"] == 0.1 and isinstance(back["b"][0], float)

import json

import numpy as np
import pytest

from cone_pathology.cli import EXIT_FAIL, EXIT_IO, EXIT_OK, main
from cone_pathology.io import read_certificate, read_instance


@pytest.fixture
def wi_file(tmp_path):
    path = tmp_path / "wi.json"
    assert main(["generate", "wi", "--m", "2", "--seed", "3", "-o", str(path)]) == EXIT_OK
    return path


def test_generate_and_classify(tmp_path, wi_file, capsys):
    assert read_instance(wi_file).meta["planted_status"] == "weakly_infeasible"
    assert main(["classify", str(wi_file)]) == EXIT_OK
    cert = read_certificate(tmp_path / "wi.cert.json")
    assert cert.status.value == "weakly_infeasible"
    assert main(["verify", str(wi_file), str(tmp_path / "wi.cert.json")]) == EXIT_OK
    assert "pass" in capsys.readouterr().out


def test_classify_batch_with_out_dir(tmp_path):
    paths = []
    for i, status in enumerate(["sf", "si", "wf"]):
        p = tmp_path / f"{status}.json"
        assert main(["generate", status, "--m", "2", "--seed", str(i), "-o", str(p)]) == EXIT_OK
        paths.append(str(p))
    out = tmp_path / "certs"
    assert main(["classify", *paths, "-o", str(out), "-j", "2"]) == EXIT_OK
    assert sorted(f.name for f in out.iterdir()) == ["sf.cert.json", "si.cert.json", "wf.cert.json"]


def test_verify_rejects_wrong_certificate(tmp_path, wi_file):
    other = tmp_path / "sf.json"
    main(["generate", "sf", "--m", "2", "-o", str(other)])
    main(["classify", str(other)])
    assert main(["verify", str(wi_file), str(tmp_path / "sf.cert.json")]) == EXIT_FAIL


def test_sequence(wi_file, capsys):
    assert main(["sequence", str(wi_file), "--eps", "1e-2,1e-4", "--json"]) == EXIT_OK
    rec = json.loads(capsys.readouterr().out)
    assert rec["k"] <= 2 and [p["distance"] <= p["target"] for p in rec["points"]] == [True, True]


def test_sequence_on_feasible_instance(tmp_path):
    p = tmp_path / "sf.json"
    main(["generate", "sf", "--m", "2", "-o", str(p)])
    assert main(["sequence", str(p)]) == EXIT_FAIL


def test_regularize(tmp_path, capsys):
    path = tmp_path / "dual.json"
    path.write_text(json.dumps({"A": [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]], "b": [-1.0, 1.0],
                                "c": [0.0, 0.0, 1.0], "cone": [{"type": "soc", "dim": 3}]}))
    assert main(["regularize", str(path), "--y-hat", "2,0", "--json"]) == EXIT_OK
    rec = json.loads(capsys.readouterr().out)
    assert rec["direct"]["status"] == "DIVERGING"
    assert abs(rec["value"]) <= 1e-8
    assert np.allclose([p["value"] for p in rec["path"]], [-0.2, -0.02, -0.002], atol=1e-8)


def test_project(capsys):
    assert main(["project", "0", "2", "0", "--json"]) == EXIT_OK
    rec = json.loads(capsys.readouterr().out)
    assert np.allclose(rec["projection"], [1.0, 1.0, 0.0]) and np.isclose(rec["distance"], np.sqrt(2))


def test_io_errors(tmp_path):
    assert main(["classify", str(tmp_path / "missing.json")]) == EXIT_IO
    bad = tmp_path / "bad.json"
    bad.write_text("[")
    assert main(["verify", str(bad), str(bad)]) == EXIT_IO
    with pytest.raises(SystemExit):
        main(["no-such-command"])

import json

import pytest

from capclosure import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    paths = {
        "zero2": "p=3 n=2\n",
        "extra4": "p=3 n=4\nv(2,1) - v(4,3)\nv(3,1)\nv(4,1)\nv(3,2)\nv(4,2)\n",
        "badhead": "p=3 m=4\n",
        "line": "p=5 n=4\nv(2,1)\n",
    }
    out = {}
    for name, text in paths.items():
        path = tmp_path / f"{name}.txt"
        path.write_text(text)
        out[name] = str(path)
    return out


def test_check_exit_codes(capsys, files):
    assert run(capsys, "check", files["zero2"])[0] == 0
    code, out, _ = run(capsys, "check", "--json", files["extra4"])
    assert code == 10
    rep = json.loads(out)
    assert rep["epicenter_dim"] == 1 and rep["verdict"] == "not_closed"
    assert list(rep)[:3] == ["schema_version", "n", "p"]
    assert rep["group_view"]["order_exponent"] == 5
    code, out, err = run(capsys, "check", files["badhead"])
    assert code == 2 and out == "" and "header" in err
    assert run(capsys, "check", files["badhead"] + ".missing")[0] == 2


def test_certified_only_flag(capsys, files):
    code, out, _ = run(capsys, "check", "--certified-only", "--json", files["line"])
    assert code == 0
    assert "direct_computation" not in json.loads(out)["certificates"]


def test_outputs_are_reloadable(capsys, files, tmp_path):
    from capclosure.io import loads_subspace

    for cmd, dim in (("closure", 6), ("complement", 1)):
        code, out, _ = run(capsys, cmd, files["extra4"])
        assert code == 0 and loads_subspace(out).subspace.dim == dim
    code, out, _ = run(capsys, "star", files["extra4"])
    f = loads_subspace(out)
    assert f.space == "W" and f.subspace.dim == 20


def test_kernel_and_witness(capsys, files):
    code, out, _ = run(capsys, "kernel", "--n", "4", "--p", "3")
    assert code == 0 and out.count("# element") == 4
    code, out, _ = run(capsys, "witness", "--json", files["zero2"])
    data = json.loads(out)
    assert code == 0 and data["order_exponent_G"] == 3 and data["order_exponent_H"] == 5


def test_bounds_tables(capsys):
    code, out, _ = run(capsys, "bounds", "--f-max", "6")
    assert code == 0 and out == "m f(m)\n3 1\n4 1\n5 2\n6 4\n"
    code, out, _ = run(capsys, "bounds", "--r-max", "3")
    assert out == "d r(d)\n0 0\n1 0\n2 0\n3 1\n"
    with pytest.raises(SystemExit) as info:
        cli.main(["bounds"])
    assert info.value.code == 2


def test_catalog(capsys):
    code, out, _ = run(capsys, "catalog", "--verify", "--p", "5")
    assert code == 0 and "28/28" in out
    code, out, _ = run(capsys, "catalog", "--p", "7")
    assert code == 0 and "n5-dim8-case4 dim=8 expected=closed r=3" in out


def test_search(capsys, tmp_path):
    out_path = tmp_path / "hits.txt"
    code, out, err = run(capsys, "search", "--n", "4", "--p", "3", "--dim", "5", "--exhaustive",
                         "--out", str(out_path))
    assert code == 0 and "non_closed=234" in out and "rate=" in err
    assert out_path.read_text().count("record\n") == 234
    code, _, _ = run(capsys, "search", "--n", "4", "--p", "3", "--dim", "9", "--exhaustive")
    assert code == 2


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["--version"])
    assert info.value.code == 0
    assert "cap" in capsys.readouterr().out

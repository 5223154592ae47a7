import json
import subprocess
import sys

import pytest

from lgfkit.cli import main
from lgfkit.tables import LgfTable


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_axial_examples(capsys):
    code, out, _ = run(capsys, "eval", "--stencil", "lgf4", "--axial", "--n", "0", "--c", "3")
    assert code == 0 and float(out) == pytest.approx(0.20655911179772892, abs=1e-15)
    code, out, _ = run(capsys, "eval", "--stencil", "meh4", "--axial", "--n", "0",
                       "--k2", "0", "--k3", "0")
    assert code == 0 and float(out) == -1 / 12
    assert out.strip() == f"{-1 / 12:.17g}"


def test_eval_k_and_c_agree(capsys):
    _, a, _ = run(capsys, "eval", "--stencil", "lgf2", "--axial", "--n", "3", "--k2", "0.5",
                  "--k3", "1.0")
    from lgfkit.stencils import get_stencil, split_symbol
    import numpy as np
    c = float(np.sum(split_symbol(get_stencil("lgf2"), np.array([0.5, 1.0]))))
    _, b, _ = run(capsys, "eval", "--stencil", "lgf2", "--axial", "--n", "3", "--c", repr(c))
    assert a == b


def test_eval_free(capsys, tmp_path):
    code, out, _ = run(capsys, "eval", "--stencil", "lgf2", "--free3d", "--n", "0", "0", "0")
    assert code == 0 and out.startswith("0.252731009858")
    batch = tmp_path / "idx.txt"
    batch.write_text("# pairs\n1 0\n0,1\n\n")
    code, out, _ = run(capsys, "eval", "--stencil", "lgf2", "--free2d", "--batch", str(batch))
    vals = [float(v) for v in out.split()]
    assert code == 0 and vals[0] == vals[1] == pytest.approx(-0.25, abs=1e-14)


@pytest.mark.parametrize("argv", [
    ["eval", "--stencil", "lgf2", "--axial", "--n", "0", "--c", "9"],
    ["eval", "--stencil", "lgf2", "--axial", "--n", "0"],
    ["eval", "--stencil", "meh4", "--axial", "--n", "0", "--y2", "2"],
    ["eval", "--stencil", "meh4", "--free3d", "--n", "0", "0", "0"],
    ["eval", "--stencil", "lgf2", "--free3d", "--n", "0", "0"],
    ["precompute", "--stencil", "meh4", "--extent", "2", "--out", "x.lgft"],
    ["verify", "nosuch"],
    ["verify", "seams", "--N", "30"],
    ["export-pack", "--stencil", "lgf2", "--kind", "taylor"],
    ["bogus"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_out_of_scope_message(capsys):
    _, _, err = run(capsys, "precompute", "--stencil", "meh4", "--extent", "2", "--out", "x")
    assert "out of scope" in err


def test_precompute_deterministic(capsys, tmp_path):
    paths = [tmp_path / "a.lgft", tmp_path / "b.lgft"]
    for p in paths:
        code, out, _ = run(capsys, "precompute", "--stencil", "lgf2", "--dim", "3", "--extent",
                           "8", "--out", str(p), "--csv", str(p) + ".csv")
        assert code == 0 and "N_evals = 165" in out and "wall time" in out
    a, b = (p.read_bytes() for p in paths)
    # identical apart from the timestamp field
    assert a[:55] == b[:55] and a[63:] == b[63:]
    t = LgfTable.read(paths[0])
    assert t.values.size == 165 and t.timestamp > 0


def test_precompute_2d(capsys, tmp_path):
    path = tmp_path / "t2.lgft"
    code, _, _ = run(capsys, "precompute", "--stencil", "lgf4", "--dim", "2", "--extent", "16",
                     "--out", str(path), "--no-stamp")
    t = LgfTable.read(path)
    assert code == 0 and t.dim == 2 and t.lookup((0, 0)) == 0.0 and t.timestamp == 0


def test_verify_residual1_and_report_file(capsys, tmp_path):
    out_file = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "residual1", "--N", "12", "--out", str(out_file))
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and len(rep["checks"]) == 6
    assert out_file.read_text().strip() == out.strip()


def test_verify_failure_exit_1(capsys):
    code, out, err = run(capsys, "verify", "oracle", "--samples", "3", "--seed", "1")
    assert code == 0
    from lgfkit import verify
    orig = verify.RESIDUAL1_LIMITS["lgf2"]
    try:
        verify.RESIDUAL1_LIMITS["lgf2"] = 0.0
        code, out, err = run(capsys, "verify", "residual1", "--N", "8", "--stencils", "lgf2")
    finally:
        verify.RESIDUAL1_LIMITS["lgf2"] = orig
    assert code == 1 and "FAILED" in err


def test_verify_oracle_reproducible(capsys):
    _, a, _ = run(capsys, "verify", "oracle", "--samples", "20", "--seed", "7")
    _, b, _ = run(capsys, "verify", "oracle", "--samples", "20", "--seed", "7")
    assert a == b and json.loads(a)["passed"]


def test_export_packs(capsys, tmp_path):
    code, out, _ = run(capsys, "export-pack", "--stencil", "lgf4", "--kind", "taylor")
    data = json.loads(out)
    assert code == 0 and data["note"] == "derived via contour residues"
    assert float(data["a"][0][0]) == pytest.approx(0.20655911179772892, abs=1e-15)
    path = tmp_path / "p.json"
    code, _, _ = run(capsys, "export-pack", "--stencil", "lgf2", "--J", "4", "--n-max", "6",
                     "--out", str(path))
    from lgfkit.series import ExpansionPack
    assert code == 0 and ExpansionPack.from_json(path.read_text()).J == 4


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "lgfkit.cli", "eval", "--stencil", "lgf2",
                          "--axial", "--n", "0", "--c", "2"], capture_output=True, text=True)
    assert res.returncode == 0 and float(res.stdout) == pytest.approx(0.28867513459481287)

"""End-to-end checks of the command-line front end.

Everything runs in-process through ``main(argv)`` so exit codes and the
stdout/stderr split are observable without spawning subprocesses.
"""

import json

import pytest

from infconv import constant_cumulant_law
from infconv.cli import main
from infconv.laws import InfLaw


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def limit_law_file(tmp_path):
    # Wishart-type limit law with unit mean slot: t = (2, 1, 0, ...), t' = (1, 0, ...)
    path = tmp_path / "law.json"
    path.write_text(constant_cumulant_law(2.0, 1.0, K=6).to_json())
    return str(path)


# -- partitions ----------------------------------------------------------------


def test_partitions_nc_pretty(capsys):
    code, out, err = run(capsys, "partitions", "3")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[-1] == "count: 5"
    assert len(lines) == 6
    assert "{{1,2,3}}" in lines


def test_partitions_ncl_single_point(capsys):
    code, out, _ = run(capsys, "partitions", "1", "--kind", "ncl")
    assert code == 0
    assert out.strip().splitlines() == ["{{1}}", "count: 1"]


def test_partitions_linked_class_of_full_block(capsys):
    code, out, _ = run(capsys, "partitions", "3", "--kind", "ncl", "--classof", "1n")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[-1] == "count: 2"
    assert set(lines[:-1]) == {"{{1,2,3}}", "{{1,2},{2,3}}"}


def test_partitions_classof_literal(capsys):
    code, out, _ = run(capsys, "partitions", "3", "--classof", "{{1,2},{3}}")
    assert code == 0
    assert out.strip().splitlines()[-1] == "count: 1"


def test_partitions_json_format(capsys):
    code, out, _ = run(capsys, "partitions", "4", "--kind", "nc", "--format", "json")
    assert code == 0
    obj = json.loads(out)
    assert obj["n"] == 4
    assert obj["count"] == 14
    assert len(obj["partitions"]) == 14


def test_partitions_csv_format(capsys):
    code, out, _ = run(capsys, "partitions", "2", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "partition"
    assert len(lines) == 3


def test_partitions_out_of_range_exits_2(capsys):
    code, out, err = run(capsys, "partitions", "99")
    assert code == 2
    assert out == ""
    assert err.startswith("error:")


def test_partitions_crossing_classof_exits_2(capsys):
    code, _, err = run(capsys, "partitions", "4", "--classof", "{{1,3},{2,4}}")
    assert code == 2
    assert "crossing" in err


# -- law -------------------------------------------------------------------------


def test_law_tcoeffs_of_limit_law(capsys, limit_law_file):
    code, out, _ = run(capsys, "law", "--in", limit_law_file,
                       "--emit", "tcoeffs", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,t,t_prime"
    rows = [line.split(",") for line in lines[1:]]
    assert [r[1] for r in rows] == ["2", "1", "0", "0", "0", "0"]
    assert [r[2] for r in rows] == ["1", "0", "0", "0", "0", "0"]


def test_law_transform_t_of_free_poisson(capsys, tmp_path):
    path = tmp_path / "fp.json"
    path.write_text(constant_cumulant_law(1.0, 0.0, K=6).to_json())
    code, out, _ = run(capsys, "law", "--in", str(path),
                       "--emit", "transform", "--kind", "t", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,re,im,re_prime,im_prime"
    body = [line.split(",")[1] for line in lines[1:]]
    assert body == ["1", "1", "0", "0", "0", "0"]  # T(z) = 1 + z


def test_law_cumulants_of_zero_law(capsys, tmp_path):
    path = tmp_path / "zero.json"
    path.write_text(json.dumps({"K": 4, "m": [[0, 0]] * 4, "m_prime": [[0, 0]] * 4}))
    code, out, _ = run(capsys, "law", "--in", str(path), "--emit", "cumulants")
    assert code == 0
    for line in out.strip().splitlines():
        assert "= 0 " in line or line.endswith("= 0")


def test_law_reads_stdin(capsys, monkeypatch, limit_law_file):
    import io
    with open(limit_law_file) as fh:
        text = fh.read()
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    code, out, _ = run(capsys, "law", "--in", "-", "--emit", "tcoeffs")
    assert code == 0
    assert "t[0] = 2" in out


def test_law_truncation_flag(capsys, limit_law_file):
    code, out, _ = run(capsys, "law", "--in", limit_law_file,
                       "--emit", "cumulants", "--format", "csv", "-K", "3")
    assert code == 0
    assert len(out.strip().splitlines()) == 4  # header + 3 rows


def test_law_malformed_json_exits_2(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, _, err = run(capsys, "law", "--in", str(path), "--emit", "cumulants")
    assert code == 2
    assert "malformed" in err


def test_law_zero_mean_s_transform_exits_3(capsys, tmp_path):
    path = tmp_path / "zm.json"
    path.write_text(json.dumps({"K": 3, "m": [[0, 0], [1, 0], [0, 0]],
                                "m_prime": [[0, 0]] * 3}))
    code, _, err = run(capsys, "law", "--in", str(path),
                       "--emit", "transform", "--kind", "s")
    assert code == 3
    assert err.startswith("error:")


def test_law_transform_without_kind_exits_2(capsys, limit_law_file):
    code, _, err = run(capsys, "law", "--in", limit_law_file, "--emit", "transform")
    assert code == 2
    assert "kind" in err


def test_law_oversized_truncation_exits_2(capsys, limit_law_file):
    code, _, _ = run(capsys, "law", "--in", limit_law_file,
                     "--emit", "cumulants", "-K", "9")
    assert code == 2


# -- convolve ----------------------------------------------------------------------


def test_convolve_free_limit_laws_squares_t(capsys, tmp_path):
    """Free product of two unit-rate limit laws: T picks up a square."""
    path = tmp_path / "w.json"
    path.write_text(constant_cumulant_law(1.0, 1.0, K=6).to_json())
    code, out, _ = run(capsys, "convolve", "--kind", "free",
                       "--law-x", str(path), "--law-y", str(path),
                       "--format", "json")
    assert code == 0
    product = json.loads(out)["law"]
    prod_path = tmp_path / "prod.json"
    prod_path.write_text(json.dumps(product))
    code, out, _ = run(capsys, "law", "--in", str(prod_path),
                       "--emit", "transform", "--kind", "t", "--format", "csv")
    assert code == 0
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    assert [r[1] for r in rows] == ["1", "2", "1", "0", "0", "0"]  # (1+z)^2
    assert [r[3] for r in rows] == ["2", "2", "0", "0", "0", "0"]  # 2(1+z)


def test_convolve_boolean_zero_partner_shifts(capsys, tmp_path):
    xpath = tmp_path / "x.json"
    xpath.write_text(json.dumps({"K": 4, "m": [[0.5, 0], [0.25, 0], [0.125, 0], [0.0625, 0]],
                                 "m_prime": [[0.1, 0]] * 4}))
    zpath = tmp_path / "z.json"
    zpath.write_text(json.dumps({"K": 4, "m": [[0, 0]] * 4, "m_prime": [[0, 0]] * 4}))
    code, out, _ = run(capsys, "convolve", "--kind", "boolean",
                       "--law-x", str(xpath), "--law-y", str(zpath),
                       "--format", "json")
    assert code == 0
    got = InfLaw.from_json_obj(json.loads(out)["law"])
    want = InfLaw.from_json(xpath.read_text())
    from infconv.laws import shifted
    db, de = got.max_abs_diff(shifted(want, 1.0))
    assert max(db, de) < 1e-12


def test_convolve_with_verify_reports_pass(capsys, tmp_path):
    path = tmp_path / "w.json"
    path.write_text(constant_cumulant_law(1.0, 2.0, K=6).to_json())
    code, out, _ = run(capsys, "convolve", "--kind", "monotone",
                       "--law-x", str(path), "--law-y", str(path),
                       "--verify", "--format", "json")
    assert code == 0
    rep = json.loads(out)["verify"]
    assert rep["pass"] is True
    assert rep["deviation_body"] < 1e-8


def test_convolve_csv_format(capsys, tmp_path):
    path = tmp_path / "w.json"
    path.write_text(constant_cumulant_law(1.0, 0.0, K=4).to_json())
    code, out, _ = run(capsys, "convolve", "--kind", "free",
                       "--law-x", str(path), "--law-y", str(path),
                       "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,m,m_prime"
    assert len(lines) == 5


def test_convolve_short_laws_exit_2(capsys, tmp_path):
    path = tmp_path / "short.json"
    path.write_text(json.dumps({"K": 2, "m": [[1, 0], [2, 0]], "m_prime": [[0, 0]] * 2}))
    code, _, err = run(capsys, "convolve", "--kind", "free",
                       "--law-x", str(path), "--law-y", str(path), "-K", "5")
    assert code == 2
    assert err.startswith("error:")


# -- wishart ---------------------------------------------------------------------


def test_wishart_writes_deterministic_csv(capsys, tmp_path):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    for target in (out_a, out_b):
        code, out, _ = run(capsys, "wishart", "--c", "1", "--cprime", "0",
                           "--N", "32,64", "--trials", "60", "--kmax", "2",
                           "--seed", "7", "--format", "csv", "--out", str(target))
        assert code == 0
        assert out == ""  # report went to the file
    assert out_a.read_text() == out_b.read_text()
    lines = out_a.read_text().strip().splitlines()
    assert lines[0] == "N,k,mean,stderr,phi_pred,phi_prime_est,phi_prime_pred"


def test_wishart_pretty_report(capsys):
    code, out, _ = run(capsys, "wishart", "--c", "1", "--N", "32,64",
                       "--trials", "60", "--kmax", "1", "--seed", "3")
    assert code == 0
    assert "extrapolated:" in out


def test_wishart_zero_trials_exits_2(capsys):
    code, _, err = run(capsys, "wishart", "--c", "1", "--trials", "0")
    assert code == 2
    assert err.startswith("error:")


def test_wishart_missing_c_exits_2(capsys):
    code, _, err = run(capsys, "wishart", "--N", "32,64", "--trials", "10")
    assert code == 2
    assert "--c" in err


# -- config file -----------------------------------------------------------------


def test_config_file_sets_defaults(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults for the enumeration runs\nformat=json\nkind=ncl\n")
    code, out, _ = run(capsys, "partitions", "3", "--config", str(cfg))
    assert code == 0
    obj = json.loads(out)
    assert obj["kind"] == "ncl"
    assert obj["count"] == 6


def test_explicit_flag_beats_config(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("kind=ncl\n")
    code, out, _ = run(capsys, "partitions", "3", "--config", str(cfg),
                       "--kind", "nc", "--format", "json")
    assert code == 0
    assert json.loads(out)["count"] == 5


def test_unknown_config_key_exits_2(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("frmat=json\n")
    code, _, err = run(capsys, "partitions", "3", "--config", str(cfg))
    assert code == 2
    assert "unknown key" in err


def test_config_line_without_equals_exits_2(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("json\n")
    code, _, err = run(capsys, "partitions", "3", "--config", str(cfg))
    assert code == 2
    assert "key=value" in err


# -- selftest --------------------------------------------------------------------


def test_selftest_passes(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[-1] == "8 passed, 0 failed"
    assert all(line.startswith("ok") for line in lines[:-1])

import json

from click.testing import CliRunner

from pachner.canonical import signature
from pachner.classify import canonical_stacked_sphere, double_cone, flag_target
from pachner.cli import main
from pachner.moves import Certificate


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_table_small():
    result = run("table", "--max-n", "8", "--threads", "1")
    assert result.exit_code == 0
    assert result.output.splitlines() == [
        "4 1 1 1",
        "5 1 1 1",
        "6 1 1 1",
        "7 3 1 3",
        "8 7 2 1,6",
    ]


def test_table_deterministic():
    a = run("table", "--max-n", "7", "--threads", "1")
    b = run("table", "--max-n", "7", "--threads", "2")
    assert a.output == b.output


def test_gen_stdout_and_file(tmp_path):
    result = run("gen", "--n", "7", "--class", "stacked", "--threads", "1")
    lines = result.output.splitlines()
    assert lines[0] == "# pachner-level n=7 class=stacked count=3"
    assert len(lines) == 4
    out = tmp_path / "sigs.txt"
    result = run("gen", "--n", "7", "--class", "stacked", "--out", str(out),
                 "--threads", "1")
    assert result.exit_code == 0
    assert out.read_text().splitlines() == lines


def test_components_json(tmp_path):
    out = tmp_path / "report.json"
    result = run("components", "--n", "8", "--class", "stacked",
                 "--json", str(out), "--threads", "1")
    assert result.exit_code == 0
    assert "sizes=1,6" in result.output
    data = json.loads(out.read_text())
    assert data["total"] == 7
    assert [c["size"] for c in data["components"]] == [1, 6]


def test_classify_sig():
    sig = signature(double_cone(8))
    result = run("classify", "--sig", sig)
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data == {
        "sig": sig, "flag": True, "stacked": False, "hamiltonian": True,
        "stacked0": False, "gamma": True, "an": False,
    }


def test_classify_file(tmp_path):
    path = tmp_path / "spheres.txt"
    path.write_text("# pachner-level n=8 class=x count=2\n"
                    + signature(flag_target(8)) + "\n"
                    + signature(canonical_stacked_sphere(8)) + "\n")
    result = run("classify", "--file", str(path))
    rows = [json.loads(line) for line in result.output.splitlines()]
    assert rows[0]["an"] and rows[0]["flag"]
    assert rows[1]["stacked0"] and not rows[1]["flag"]


def test_classify_usage_error():
    assert run("classify").exit_code == 2
    assert run("classify", "--sig", "x", "--file", "y").exit_code == 2


def test_flip_graph_dot(tmp_path):
    out = tmp_path / "g.dot"
    result = run("flip-graph", "--n", "7", "--class", "all",
                 "--dot", str(out), "--threads", "1")
    assert result.exit_code == 0
    assert out.read_text().startswith('graph "all_7"')


def test_path_flag_verify():
    sig = signature(flag_target(9))
    result = run("path-flag", "--from", sig, "--verify")
    assert result.exit_code == 0
    cert = Certificate.from_json(result.output)
    assert cert.start == cert.end == sig


def test_path_flag_gamma_is_validation_error():
    result = run("path-flag", "--from", signature(double_cone(8)))
    assert result.exit_code == 3


def test_path_stacked_verify():
    sig = signature(canonical_stacked_sphere(9))
    result = run("path-stacked", "--from", sig, "--verify")
    assert result.exit_code == 0
    cert = Certificate.from_json(result.output)
    assert cert.moves == ()


def test_verify_command(tmp_path):
    sig = signature(flag_target(9))
    cert_json = run("path-flag", "--from", sig).output
    path = tmp_path / "cert.json"
    path.write_text(cert_json)
    assert run("verify", "--cert", str(path)).exit_code == 0
    # tamper with the endpoint
    tampered = json.loads(cert_json)
    tampered["end"] = signature(double_cone(9))
    path.write_text(json.dumps(tampered))
    result = run("verify", "--cert", str(path))
    assert result.exit_code == 4


def test_special():
    assert run("special", "--gamma", "6").output.strip() == \
        signature(double_cone(6))
    assert run("special", "--an", "9").output.strip() == \
        signature(flag_target(9))
    assert run("special", "--delta", "10").output.strip() == \
        signature(canonical_stacked_sphere(10))
    base = signature(double_cone(6))
    klee_out = run("special", "--klee", base).output.strip()
    assert klee_out.startswith("14:")
    isolated = run("special", "--isolated", "2").output.splitlines()
    assert len(isolated) == 1 and isolated[0].startswith("11:")
    assert run("special").exit_code == 2
    assert run("special", "--gamma", "6", "--an", "7").exit_code == 2


def test_bad_signature_is_validation_error():
    assert run("classify", "--sig", "garbage").exit_code == 3
    assert run("special", "--klee", "4:1,2,3").exit_code == 3

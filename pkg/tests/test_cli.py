import json

import pytest

from shearkit.cli import EXIT_NOT_ESTABLISHED, EXIT_OK, EXIT_USAGE, run


def run_cli(*argv):
    return run(list(argv))


class TestVerifyIdentity:
    def test_established_shear_identity(self, capsys):
        code = run_cli(
            "verify-identity", "andersen-lempert", "--f1", "x2", "--f2", "x1", "-n", "2"
        )
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["established"] is True

    def test_compat_pair_identity(self):
        code = run_cli(
            "verify-identity", "compat-pair",
            "--d1", "[1;0]", "--d2", "[0;1]", "--a", "x1",
            "--f1", "1", "--f2", "1", "-n", "2",
        )
        assert code == EXIT_OK

    def test_codim2_identity(self):
        code = run_cli(
            "verify-identity", "codim2-pair",
            "--f1", "1", "--h1", "x2", "--f2", "1", "--h2", "x1", "-n", "3",
        )
        assert code == EXIT_OK

    def test_local_triple(self):
        code = run_cli(
            "verify-identity", "local-triple",
            "--r", "x2^2", "--h", "1", "-s", "0", "--f", "x3", "--g", "x3", "-n", "3",
        )
        assert code == EXIT_OK

    def test_precondition_violation_is_usage_error(self):
        code = run_cli(
            "verify-identity", "andersen-lempert", "--f1", "x1", "--f2", "x1", "-n", "2"
        )
        assert code == EXIT_USAGE

    def test_parse_error_is_usage_error(self):
        code = run_cli(
            "verify-identity", "andersen-lempert", "--f1", "x9", "--f2", "x1", "-n", "2"
        )
        assert code == EXIT_USAGE


class TestCompat:
    def test_coordinate_pair(self, capsys):
        code = run_cli("compat", "--d1", "[1;0]", "--d2", "[0;1]", "-d", "4")
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["condition_one"]["kind"] == "full-span"
        assert payload["condition_two"]["a"] == "x1"

    def test_negative_pair_exits_nonzero(self):
        code = run_cli("compat", "--d1", "[1;0]", "--d2", "[x1;0]", "-d", "2")
        assert code == EXIT_NOT_ESTABLISHED


class TestClosure:
    def test_builtin_family(self, capsys, tmp_path):
        out = tmp_path / "closure.json"
        code = run_cli(
            "closure", "--shear-family", "4", "--monomial-targets", "4",
            "-D", "4", "-o", str(out),
        )
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["span_dimension"] == 30

    def test_generators_file_not_established(self, tmp_path):
        gens = tmp_path / "gens.txt"
        gens.write_text("[1; 0]\n")
        targets = tmp_path / "targets.txt"
        targets.write_text("[x1; 0]\n")
        code = run_cli(
            "closure", "--generators", str(gens), "--targets", str(targets), "-D", "2"
        )
        assert code == EXIT_NOT_ESTABLISHED

    def test_missing_input_is_usage_error(self):
        assert run_cli("closure", "-D", "2") == EXIT_USAGE


class TestCodim2:
    def test_inline_generators(self, capsys):
        code = run_cli("codim2", "--gens", "x1", "x2", "-n", "3", "-d", "2")
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["h1"] == "x2"
        assert payload["h2"] == "x1"

    def test_ideal_file(self, tmp_path, capsys):
        ideal = tmp_path / "ideal.json"
        ideal.write_text(
            json.dumps({"nvars": 2, "generators": ["x1", "x2"], "schema_version": 1})
        )
        code = run_cli("codim2", "--ideal", str(ideal), "-d", "2")
        assert code == EXIT_OK


class TestSlDemo:
    def test_default_run(self, capsys):
        code = run_cli("sl-demo", "-n", "2", "--trials", "50")
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["points_tested"] == 50
        assert payload["tangency_symbolic"] is True


class TestDecompose:
    def test_listing(self, capsys):
        code = run_cli("decompose", "--field", "[x2^2; x2^2]")
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        kinds = [p["kind"] for p in payload["primitives"]]
        assert kinds == ["shear", "bracket-pair"]


class TestApprox:
    def test_report(self, capsys):
        code = run_cli(
            "approx", "--field", "[0; x2^2]", "-T", "0.5",
            "--substeps", "8,16,32", "--points", "10",
        )
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["report"]["order"] >= 0.8

    def test_isotopy_file_and_saved_sequence(self, tmp_path, capsys):
        isotopy = tmp_path / "isotopy.json"
        isotopy.write_text(json.dumps({"fields": ["[1; 0]", "[0; 1]"]}))
        saved = tmp_path / "sequence.json"
        code = run_cli(
            "approx", "--isotopy", str(isotopy), "-T", "1.0",
            "--substeps", "2,4,8", "--points", "5",
            "--save-sequence", str(saved),
        )
        assert code == EXIT_OK
        from shearkit.dynamics import autoseq_from_json_dict

        seq = autoseq_from_json_dict(json.loads(saved.read_text()))
        end = seq.apply((0, 0))
        assert abs(end[0] - 0.5) < 1e-9 and abs(end[1] - 0.5) < 1e-9


class TestBasin:
    def test_builtin_map_artifacts(self, tmp_path, capsys):
        csv = tmp_path / "basin.csv"
        pgm = tmp_path / "basin.pgm"
        code = run_cli(
            "basin", "--builtin", "attracting-shears",
            "--nu", "20", "--nv", "20", "--csv", str(csv), "--pgm", str(pgm),
        )
        assert code == EXIT_OK
        assert csv.read_text().startswith("row,col,re,im,class,iters")
        assert pgm.read_bytes().startswith(b"P5\n20 20\n255\n")

    def test_map_file(self, tmp_path):
        from shearkit.dynamics import autoseq_to_json_dict, radial_contraction

        map_path = tmp_path / "map.json"
        map_path.write_text(json.dumps(autoseq_to_json_dict(radial_contraction(2))))
        csv = tmp_path / "b.csv"
        code = run_cli(
            "basin", "--map", str(map_path), "--nu", "5", "--nv", "5", "--csv", str(csv)
        )
        assert code == EXIT_OK


class TestDeterminism:
    def test_identical_jobs_produce_identical_artifacts(self, tmp_path):
        outputs = []
        for name in ("a", "b"):
            out = tmp_path / f"{name}.json"
            code = run_cli(
                "closure", "--shear-family", "3", "--monomial-targets", "3",
                "-D", "3", "-o", str(out), "--seed", "7",
            )
            assert code == EXIT_OK
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_sl_demo_seeded(self, capsys):
        payloads = []
        for _ in range(2):
            assert run_cli("sl-demo", "-n", "2", "--trials", "10", "--seed", "5") == EXIT_OK
            payloads.append(capsys.readouterr().out)
        assert payloads[0] == payloads[1]


def test_usage_error_exit_code():
    assert run_cli("no-such-command") == EXIT_USAGE
    assert run_cli("compat", "--d1", "[1;0]") == EXIT_USAGE

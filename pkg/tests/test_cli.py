import pytest
import yaml
from click.testing import CliRunner

from hardness_chain import __version__
from hardness_chain.cli import main
from hardness_chain.core.mrd import NO_INSTANCE
from hardness_chain.core.numtheory import Factorization
from hardness_chain.core.qc_reduction import QCInstance
from hardness_chain.core.stoch_ilp import TwoStageILP, read_2ssilp, reduce_mrd_to_ilp, write_2ssilp
from hardness_chain.utils import documents


@pytest.fixture
def runner():
    return CliRunner()


def write_document(path, document):
    path.write_text(documents.dump_document(document))
    return str(path)


@pytest.fixture
def small_qc(tmp_path):
    """z^2 == 4 (mod 15), 0 < z <= 4"""
    instance = QCInstance(4, 15, 4, Factorization(((3, 1), (5, 1))))
    return write_document(tmp_path / "small-qc.yaml", documents.qc_document(instance))


@pytest.fixture
def toy_mrd_file(tmp_path, toy_mrd):
    return write_document(tmp_path / "toy-mrd.yaml", documents.mrd_document(toy_mrd, "pair"))


@pytest.fixture
def toy_ilp_file(tmp_path, toy_mrd):
    path = tmp_path / "toy.2ssilp"
    path.write_text(write_2ssilp(reduce_mrd_to_ilp(toy_mrd)))
    return str(path)


def test_version(runner):
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


class TestReductionCommands:
    def test_sat_qc(self, runner, mini_cnf, tmp_path):
        output = tmp_path / "qc.yaml"
        result = runner.invoke(main, ["sat-qc", str(mini_cnf), "-o", str(output)])
        assert result.exit_code == 0, result.output
        data = yaml.safe_load(output.read_text())
        assert data["kind"] == "qc"
        assert len(data["factorization"]) == 68
        assert data["system"]["n"] == 7

    def test_sat_qc_trivial(self, runner, tmp_path):
        path = tmp_path / "one.cnf"
        path.write_text("p cnf 3 1\n1 2 3 0\n")
        result = runner.invoke(main, ["sat-qc", str(path), "-o", str(tmp_path / "qc.yaml")])
        assert result.exit_code == 0
        assert "Trivially reduced" in result.output
        assert not (tmp_path / "qc.yaml").exists()

    def test_sat_qc_paper_mode_is_an_error(self, runner, mini_cnf, tmp_path):
        result = runner.invoke(main, ["sat-qc", str(mini_cnf), "-o", str(tmp_path / "qc.yaml"),
                                      "--coeff-mode", "paper"])
        assert result.exit_code == 2
        assert "Error" in result.output

    def test_malformed_cnf_is_an_error(self, runner, tmp_path):
        path = tmp_path / "bad.cnf"
        path.write_text("p cnf 1 1\n1 2 0\n")
        result = runner.invoke(main, ["sat-qc", str(path), "-o", str(tmp_path / "qc.yaml")])
        assert result.exit_code == 2

    def test_qc_mrd_chain(self, runner, mini_cnf, tmp_path):
        qc_path, mrd_path, ilp_path = tmp_path / "qc.yaml", tmp_path / "mrd.yaml", tmp_path / "out.2ssilp"
        assert runner.invoke(main, ["sat-qc", str(mini_cnf), "-o", str(qc_path)]).exit_code == 0

        result = runner.invoke(main, ["qc-mrd", str(qc_path), "-o", str(mrd_path), "--residue-mode", "pair"])
        assert result.exit_code == 0, result.output
        assert "68 equations" in result.output
        mrd = documents.mrd_from_document(documents.load_document(mrd_path.read_text(), "mrd"))
        assert mrd.mode == "pair"

        result = runner.invoke(main, ["mrd-ilp", str(mrd_path), "-o", str(ilp_path)])
        assert result.exit_code == 0, result.output
        assert read_2ssilp(ilp_path.read_text()) == reduce_mrd_to_ilp(mrd)

    def test_qc_mrd_no_instance(self, runner, tmp_path):
        instance = QCInstance(2, 5, 5, Factorization(((5, 1),)))
        path = write_document(tmp_path / "qc.yaml", documents.qc_document(instance))
        output = tmp_path / "mrd.yaml"
        result = runner.invoke(main, ["qc-mrd", path, "-o", str(output)])
        assert result.exit_code == 1
        assert "NoInstance" in result.output
        assert yaml.safe_load(output.read_text())["no_instance"] is True

    def test_mrd_ilp(self, runner, toy_mrd_file, toy_mrd, tmp_path):
        output = tmp_path / "toy.2ssilp"
        result = runner.invoke(main, ["mrd-ilp", toy_mrd_file, "-o", str(output)])
        assert result.exit_code == 0
        assert read_2ssilp(output.read_text()) == reduce_mrd_to_ilp(toy_mrd)

        none_path = write_document(tmp_path / "none.yaml", documents.mrd_document(NO_INSTANCE, "full"))
        result = runner.invoke(main, ["mrd-ilp", none_path, "-o", str(tmp_path / "none.2ssilp")])
        assert result.exit_code == 1

    def test_wrong_document_kind(self, runner, small_qc, tmp_path):
        result = runner.invoke(main, ["mrd-ilp", small_qc, "-o", str(tmp_path / "x.2ssilp")])
        assert result.exit_code == 2

    def test_encode(self, runner, toy_ilp_file, tmp_path):
        output = tmp_path / "encoded.2ssilp"
        result = runner.invoke(main, ["encode", toy_ilp_file, "-o", str(output)])
        assert result.exit_code == 0, result.output
        assert "D = 3" in result.output
        encoded = read_2ssilp(output.read_text())
        assert (encoded.r, encoded.t, encoded.delta) == (8, 9, 2)


class TestSolveAndVerify:
    def test_solve_cnf(self, runner, mini_cnf, unsat_cnf):
        result = runner.invoke(main, ["solve", "cnf", str(mini_cnf)])
        assert result.exit_code == 0
        assert "satisfiable: 0 0 1" in result.output

        result = runner.invoke(main, ["solve", "cnf", str(unsat_cnf)])
        assert result.exit_code == 1
        assert "No solution" in result.output

    def test_solve_and_verify_qc(self, runner, small_qc, tmp_path):
        witness = tmp_path / "witness.yaml"
        result = runner.invoke(main, ["solve", "qc", small_qc, "-o", str(witness)])
        assert result.exit_code == 0
        assert "z = 2" in result.output

        result = runner.invoke(main, ["verify", "qc", small_qc, "-w", str(witness)])
        assert result.exit_code == 0
        assert "Witness verified" in result.output

        wrong = write_document(tmp_path / "wrong.yaml", documents.witness_document("qc", z=3))
        result = runner.invoke(main, ["verify", "qc", small_qc, "-w", wrong])
        assert result.exit_code == 1
        assert "Witness rejected" in result.output

    def test_solve_qc_cap(self, runner, small_qc):
        result = runner.invoke(main, ["solve", "qc", small_qc, "--brute-cap", "1"])
        assert result.exit_code == 1

    def test_solve_and_verify_mrd(self, runner, toy_mrd_file, tmp_path):
        witness = tmp_path / "witness.yaml"
        result = runner.invoke(main, ["solve", "mrd", toy_mrd_file, "-o", str(witness)])
        assert result.exit_code == 0
        assert "z = 2" in result.output
        result = runner.invoke(main, ["verify", "mrd", toy_mrd_file, "-w", str(witness)])
        assert result.exit_code == 0

        mismatched = write_document(tmp_path / "bad.yaml", documents.witness_document("mrd", z=2, choice=(1, 2)))
        assert runner.invoke(main, ["verify", "mrd", toy_mrd_file, "-w", mismatched]).exit_code == 1

    @pytest.mark.parametrize("method", ["auto", "reduced", "exhaustive"])
    def test_solve_2ssilp(self, runner, toy_ilp_file, method):
        result = runner.invoke(main, ["solve", "2ssilp", toy_ilp_file, "--method", method])
        assert result.exit_code == 0, result.output
        assert "x = [2, 0, 0, 1, 0, 1, 0]" in result.output

    def test_solve_general_2ssilp(self, runner, tmp_path):
        ilp = TwoStageILP(
            n=1, r=1, s=1, t=1,
            A_blocks=(((1,),),), B_blocks=(((3,),),), b=(6,),
            L=(0, 0), U=(0, 5), w=(0, 0),
        )
        path = tmp_path / "general.2ssilp"
        path.write_text(write_2ssilp(ilp))
        result = runner.invoke(main, ["solve", "2ssilp", str(path)])
        assert result.exit_code == 0, result.output
        assert "x = [0, 2]" in result.output

    def test_solve_general_2ssilp_with_reduction_dimensions(self, runner, tmp_path):
        ilp = TwoStageILP(
            n=1, r=2, s=1, t=2,
            A_blocks=(((1,), (0,)),), B_blocks=(((1, 0), (0, 1)),), b=(2, 1),
            L=(0, 0, 0), U=(5, 5, 5), w=(0, 0, 0),
        )
        path = tmp_path / "general.2ssilp"
        path.write_text(write_2ssilp(ilp))
        result = runner.invoke(main, ["solve", "2ssilp", str(path)])
        assert result.exit_code == 0, result.output
        assert "x = [0, 2, 1]" in result.output

    def test_verify_2ssilp(self, runner, toy_ilp_file, tmp_path):
        good = write_document(tmp_path / "good.yaml",
                              documents.witness_document("2ssilp", solution=(2, 0, 0, 1, 0, 1, 0)))
        assert runner.invoke(main, ["verify", "2ssilp", toy_ilp_file, "-w", good]).exit_code == 0
        short = write_document(tmp_path / "short.yaml", documents.witness_document("2ssilp", solution=(2, 0)))
        assert runner.invoke(main, ["verify", "2ssilp", toy_ilp_file, "-w", short]).exit_code == 1

    def test_verify_cnf(self, runner, mini_cnf, tmp_path):
        good = write_document(tmp_path / "good.yaml",
                              documents.witness_document("sat", assignment=(False, False, True)))
        bad = write_document(tmp_path / "bad.yaml",
                             documents.witness_document("sat", assignment=(False, False, False)))
        assert runner.invoke(main, ["verify", "cnf", str(mini_cnf), "-w", good]).exit_code == 0
        assert runner.invoke(main, ["verify", "cnf", str(mini_cnf), "-w", bad]).exit_code == 1


class TestPipelineCommands:
    def test_pipeline_satisfiable(self, runner, mini_cnf, tmp_path):
        output = tmp_path / "run"
        result = runner.invoke(main, ["pipeline", str(mini_cnf), "-o", str(output), "--encode"])
        assert result.exit_code == 0, result.output
        for name in ("qc.yaml", "mrd.yaml", "instance.2ssilp", "encoded.2ssilp", "witness-encoded.yaml"):
            assert (output / name).exists()

    def test_pipeline_unsatisfiable(self, runner, unsat_cnf, tmp_path):
        output = tmp_path / "run"
        result = runner.invoke(main, ["pipeline", str(unsat_cnf), "-o", str(output)])
        assert result.exit_code == 1
        assert not (output / "witness-qc.yaml").exists()

    def test_pipeline_brute_cap(self, runner, mini_cnf, tmp_path):
        # three variables need 8 assignments
        capped = runner.invoke(main, ["pipeline", str(mini_cnf), "-o", str(tmp_path / "capped"),
                                      "--brute-cap", "4"])
        assert capped.exit_code == 2
        result = runner.invoke(main, ["pipeline", str(mini_cnf), "-o", str(tmp_path / "run"),
                                      "--brute-cap", "8"])
        assert result.exit_code == 0, result.output

    def test_pipeline_paper_mode(self, runner, mini_cnf, tmp_path):
        result = runner.invoke(main, ["pipeline", str(mini_cnf), "-o", str(tmp_path / "run"),
                                      "--coeff-mode", "paper"])
        assert result.exit_code == 2

    def test_config_file(self, runner, mini_cnf, tmp_path):
        config = tmp_path / "config.yaml"
        config.write_text(yaml.safe_dump({"reduction": {"residue_mode": "pair"}}))
        output = tmp_path / "run"
        result = runner.invoke(main, ["-c", str(config), "pipeline", str(mini_cnf), "-o", str(output)])
        assert result.exit_code == 0, result.output
        assert yaml.safe_load((output / "mrd.yaml").read_text())["mode"] == "pair"

    def test_audit_formula(self, runner, mini_cnf, tmp_path):
        output = tmp_path / "audit"
        result = runner.invoke(main, ["audit", str(mini_cnf), "-o", str(output)])
        assert result.exit_code == 0, result.output
        data = yaml.safe_load((output / "audit.yaml").read_text())
        assert data["passed"] is True
        assert data["checks"]["uniqueness"] is True
        assert (output / "audit.txt").read_text().startswith("Reduction audit: PASSED")

    def test_audit_qc_document(self, runner, mini_cnf, small_qc, tmp_path):
        qc_path = tmp_path / "qc.yaml"
        runner.invoke(main, ["sat-qc", str(mini_cnf), "-o", str(qc_path)])
        result = runner.invoke(main, ["audit", str(qc_path), "--no-uniqueness"])
        assert result.exit_code == 0, result.output

        result = runner.invoke(main, ["audit", small_qc])
        assert result.exit_code == 2
        assert "system" in result.output

    def test_gen_corpus(self, runner, tmp_path):
        output = tmp_path / "corpus"
        result = runner.invoke(main, ["gen-corpus", "-o", str(output), "--count", "3", "--seed", "7"])
        assert result.exit_code == 0, result.output
        assert sorted(p.name for p in output.iterdir()) == ["formula-000.cnf", "formula-001.cnf", "formula-002.cnf"]

        again = tmp_path / "again"
        runner.invoke(main, ["gen-corpus", "-o", str(again), "--count", "3", "--seed", "7"])
        assert (again / "formula-001.cnf").read_text() == (output / "formula-001.cnf").read_text()

    def test_gen_corpus_with_audit(self, runner, tmp_path):
        output = tmp_path / "corpus"
        result = runner.invoke(main, ["gen-corpus", "-o", str(output), "--count", "2", "--seed", "3",
                                      "--num-clauses", "4", "--audit"])
        assert result.exit_code == 0, result.output
        csv = (output / "corpus-audit.csv").read_text()
        assert csv.startswith("index,n,ell_prime,m_prime")
        assert "2/2 satisfiable" in result.output

    def test_gen_corpus_bounds(self, runner, tmp_path):
        result = runner.invoke(main, ["gen-corpus", "-o", str(tmp_path), "--num-vars", "9"])
        assert result.exit_code == 2

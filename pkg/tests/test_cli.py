"""Command-line surface: exit codes, files, pipelines."""

import json

import numpy as np
import pytest

import medsolve as ms
from conftest import random_gram, solve_direct
from medsolve import serialize
from medsolve.cli import main


def write_gram(path, gram):
    serialize.write_json(path, serialize.gram_to_dict(gram))
    return str(path)


def certify_payload(path, ensemble, povm):
    serialize.write_json(
        path,
        {"ensemble": serialize.ensemble_to_dict(ensemble), "povm": serialize.povm_to_dict(povm)},
    )
    return str(path)


class TestSolve:
    def test_reference_matrix_defaults(self, tmp_path):
        inp = write_gram(tmp_path / "ref5.json", ms.reference_five_state_gram())
        code = main(["solve", inp, "--out", str(tmp_path)])
        assert code == 0
        trace = (tmp_path / "ref5-trace.csv").read_text().strip().splitlines()
        assert len(trace) == 1001
        logs = np.array([float(line.split(",")[2]) for line in trace[1:]])
        assert np.all(logs > -17.5) and np.all(logs < -15.0)
        report = json.loads((tmp_path / "ref5-report.json").read_text())
        assert report["certificate"]["status"] == "optimal"

    def test_malformed_json_is_usage_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"m": 2, "gram_re": [[0.5, 0], [0, 0.5]]}')
        code = main(["solve", str(bad), "--out", str(tmp_path)])
        assert code == 64
        assert "gram_im" in capsys.readouterr().err

    def test_near_dependent_input_is_invalid_data(self, tmp_path, capsys):
        entries = np.array([[0.5, 0.5 - 5e-11], [0.5 - 5e-11, 0.5]])
        payload = {"m": 2, "gram_re": entries.tolist(), "gram_im": np.zeros((2, 2)).tolist()}
        path = tmp_path / "dep.json"
        serialize.write_json(path, payload)
        code = main(["solve", str(path), "--out", str(tmp_path)])
        assert code == 65
        assert "positive definite" in capsys.readouterr().err

    def test_steps_h_mismatch_is_usage_error(self, tmp_path):
        inp = write_gram(tmp_path / "g.json", random_gram(3, seed=800))
        code = main(["solve", inp, "--out", str(tmp_path), "--steps", "100", "--h", "1e-3"])
        assert code == 64

    def test_ensemble_input_gets_ambient_povm(self, tmp_path):
        ens = ms.random_ensemble(3, seed=801, spread=0.6)
        path = tmp_path / "ens.json"
        serialize.write_json(path, serialize.ensemble_to_dict(ens))
        code = main(["solve", str(path), "--out", str(tmp_path), "--steps", "250", "--h", "4e-3"])
        assert code == 0
        report = json.loads((tmp_path / "ens-report.json").read_text())
        assert report["final_povm"]["frame"] == "ambient"

    def test_route_through_intermediate_gram(self, tmp_path):
        g_a = random_gram(3, seed=802, spread=0.4)
        g_b = random_gram(3, seed=803, spread=0.7)
        via = write_gram(tmp_path / "via.json", g_a)
        inp = write_gram(tmp_path / "target.json", g_b)
        code = main(["solve", inp, "--from", via, "--out", str(tmp_path),
                     "--steps", "250", "--h", "4e-3"])
        assert code == 0
        report = json.loads((tmp_path / "target-report.json").read_text())
        direct = solve_direct(g_b)
        assert report["certificate"]["p_success"] == pytest.approx(
            direct.certificate.p_success, abs=1e-8
        )

    def test_batch_mode(self, tmp_path):
        batch = tmp_path / "batch"
        batch.mkdir()
        write_gram(batch / "a.json", random_gram(2, seed=804))
        write_gram(batch / "b.json", random_gram(3, seed=805))
        out = tmp_path / "out"
        code = main(["solve", "--batch", str(batch), "--out", str(out),
                     "--steps", "250", "--h", "4e-3"])
        assert code == 0
        assert (out / "a-report.json").exists()
        assert (out / "b-trace.csv").exists()

    def test_batch_mode_continues_past_bad_inputs(self, tmp_path, capsys):
        batch = tmp_path / "batch"
        batch.mkdir()
        (batch / "broken.json").write_text("{not json")
        write_gram(batch / "good.json", random_gram(2, seed=810))
        out = tmp_path / "out"
        code = main(["solve", "--batch", str(batch), "--out", str(out),
                     "--steps", "250", "--h", "4e-3"])
        assert code == 64  # worst per-file code wins
        assert (out / "good-report.json").exists()
        assert "broken: failed (64)" in capsys.readouterr().out


class TestCertify:
    def test_orthogonal_projectors_certify(self, tmp_path):
        ens = ms.Ensemble(np.eye(3), np.full(3, 1 / 3))
        povm = ms.Povm(np.eye(3), frame=ms.FRAME_AMBIENT)
        inp = certify_payload(tmp_path / "ok.json", ens, povm)
        assert main(["certify", inp, "--out", str(tmp_path)]) == 0
        cert = json.loads((tmp_path / "ok-certificate.json").read_text())
        assert cert["status"] == "optimal"

    def test_swapped_two_state_point_exits_2(self, tmp_path):
        result = ms.helstrom(0.6, 0.4, 0.5)
        psi1 = np.array([1.0, 0.0], dtype=complex)
        psi2 = np.array([0.5, np.sqrt(0.75)], dtype=complex)
        ens = ms.Ensemble(np.stack([psi1, psi2], axis=1), np.array([0.6, 0.4]))
        swapped = ms.Povm(result.povm.vectors[:, ::-1], frame=ms.FRAME_AMBIENT)
        inp = certify_payload(tmp_path / "swap.json", ens, swapped)
        assert main(["certify", inp, "--out", str(tmp_path)]) == 2

    def test_random_basis_exits_3(self, tmp_path):
        ens = ms.random_ensemble(3, seed=806, spread=0.6)
        rng = np.random.default_rng(0)
        from medsolve.linalg import haar_unitary

        povm = ms.Povm(haar_unitary(rng, 3), frame=ms.FRAME_AMBIENT)
        inp = certify_payload(tmp_path / "rand.json", ens, povm)
        assert main(["certify", inp, "--out", str(tmp_path)]) == 3

    def test_frame_mismatch_is_usage_error(self, tmp_path):
        ens = ms.random_ensemble(2, seed=807, spread=0.5)
        povm = ms.Povm(np.eye(2), frame=ms.FRAME_DUAL)
        inp = certify_payload(tmp_path / "frame.json", ens, povm)
        assert main(["certify", inp, "--out", str(tmp_path)]) == 64


class TestEnumerate:
    def test_symmetric_case_reports_five_real_roots(self, tmp_path):
        inp = write_gram(tmp_path / "id3.json", ms.GramMatrix(np.eye(3) / 3))
        code = main(["enumerate", inp, "--out", str(tmp_path)])
        assert code == 0
        landscape = json.loads((tmp_path / "id3-landscape.json").read_text())
        real = [r for r in landscape["roots"] if r["is_real"]]
        assert len(real) == 5
        assert sum(r["is_positive_definite"] for r in real) == 1


class TestAudit:
    def test_solved_three_state_passes(self, tmp_path):
        gram = random_gram(3, seed=808)
        report = solve_direct(gram)
        serialize.write_json(
            tmp_path / "aud.json",
            {"ensemble": serialize.gram_to_dict(gram),
             "povm": serialize.povm_to_dict(report.final_povm)},
        )
        assert main(["audit", str(tmp_path / "aud.json"), "--out", str(tmp_path)]) == 0
        audit = json.loads((tmp_path / "aud-audit.json").read_text())
        assert audit["passed"] is True

    def test_perturbed_measurement_fails(self, tmp_path):
        gram = random_gram(3, seed=809)
        report = solve_direct(gram)
        realization = ms.ensemble_from_gram(gram)
        rng = np.random.default_rng(1)
        k = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        k = 0.5 * (k - k.conj().T)
        w, v = np.linalg.eigh(1j * k)
        q = (v * np.exp(-1j * 2e-3 * w)) @ v.conj().T
        bent = ms.Povm(q @ report.final_povm.vectors, frame=ms.FRAME_AMBIENT)
        inp = certify_payload(tmp_path / "bent.json", realization, bent)
        assert main(["audit", inp, "--out", str(tmp_path)]) == 3


class TestPipeline:
    def test_generate_solve_certify(self, tmp_path):
        assert main(["generate", "--m", "3", "--seed", "1", "--spread", "0.6",
                     "--out", str(tmp_path)]) == 0
        ens_path = tmp_path / "ensemble-m3-seed1.json"
        assert ens_path.exists()
        assert main(["solve", str(ens_path), "--out", str(tmp_path),
                     "--steps", "250", "--h", "4e-3"]) == 0
        report = json.loads((tmp_path / "ensemble-m3-seed1-report.json").read_text())
        povm = report["final_povm"]
        ens = json.loads(ens_path.read_text())
        serialize.write_json(tmp_path / "check.json", {"ensemble": ens, "povm": povm})
        assert main(["certify", str(tmp_path / "check.json"), "--out", str(tmp_path)]) == 0

    def test_generate_is_deterministic(self, tmp_path):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        main(["generate", "--m", "4", "--seed", "9", "--out", str(a_dir)])
        main(["generate", "--m", "4", "--seed", "9", "--out", str(b_dir)])
        a = (a_dir / "ensemble-m4-seed9.json").read_bytes()
        b = (b_dir / "ensemble-m4-seed9.json").read_bytes()
        assert a == b


class TestReproduceFig1:
    def test_emits_full_trace(self, tmp_path):
        code = main(["reproduce-fig1", "--out", str(tmp_path)])
        assert code == 0
        lines = (tmp_path / "fig1-trace.csv").read_text().strip().splitlines()
        assert len(lines) == 1001  # header + one row per iteration


class TestUsage:
    def test_unknown_flag_exits_64(self, capsys):
        assert main(["solve", "--no-such-flag"]) == 64

    def test_help_exits_zero(self):
        assert main(["--help"]) == 0

    def test_missing_input_exits_64(self):
        assert main(["solve"]) == 64

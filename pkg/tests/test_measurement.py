"""Measurement construction and success statistics."""

import numpy as np
import pytest

import medsolve as ms
from conftest import identity_gram, random_gram
from medsolve.linalg import haar_unitary


def circulant_gram_m3(off=0.08):
    row = np.array([1 / 3, off, off])
    entries = np.stack([np.roll(row, k) for k in range(3)])
    return ms.GramMatrix(entries + 0j)


class TestPovmFromUnitary:
    def test_orthogonal_case_returns_the_states(self):
        ens = ms.Ensemble(np.eye(3), np.full(3, 1 / 3))
        povm = ms.povm_from_unitary(identity_gram(3), np.eye(3), ensemble=ens)
        assert np.max(np.abs(povm.vectors - ens.states)) < 1e-12
        assert povm.frame == ms.FRAME_AMBIENT

    def test_orthonormality_residual(self):
        rng = np.random.default_rng(0)
        for seed in range(5):
            g = random_gram(4, seed + 100)
            u = haar_unitary(rng, 4)
            povm = ms.povm_from_unitary(g, u)
            overlaps = povm.vectors.conj().T @ povm.vectors
            assert np.max(np.abs(overlaps - np.eye(4))) < 1e-10

    def test_rejects_non_unitary(self):
        with pytest.raises(ms.NotUnitary):
            ms.povm_from_unitary(identity_gram(3), np.eye(3) * 1.01)

    def test_phase_freedom_leaves_success_unchanged(self):
        g = random_gram(3, seed=4)
        rng = np.random.default_rng(1)
        u = haar_unitary(rng, 3)
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, 3))
        base = ms.success_probability(g, u)
        shifted = ms.success_probability(g, u @ np.diag(phases))
        assert abs(base.p_success - shifted.p_success) < 1e-12
        assert np.max(np.abs(base.per_outcome - shifted.per_outcome)) < 1e-12

    def test_definition_consistency(self):
        # recomputing <psi~_i|v_j> must give back (G^{1/2} U)_{ij}
        g = random_gram(4, seed=21)
        ens = ms.ensemble_from_gram(g)
        rng = np.random.default_rng(2)
        u = haar_unitary(rng, 4)
        povm = ms.povm_from_unitary(g, u, ensemble=ens)
        overlaps = ens.scaled_states.conj().T @ povm.vectors
        assert np.max(np.abs(overlaps - g.sqrt() @ u)) < 1e-10


class TestPgm:
    def test_orthogonal_ensemble_is_perfect(self):
        report = ms.success_probability(identity_gram(4), np.eye(4))
        assert abs(report.p_success - 1.0) < 1e-12

    def test_equiprobable_pair_matches_closed_form(self):
        # for two equiprobable states the square-root measurement is optimal
        for overlap in (0.2, 0.5, 0.8):
            entries = 0.5 * np.array([[1.0, overlap], [overlap, 1.0]])
            g = ms.GramMatrix(entries + 0j)
            pgm_ps = ms.success_probability(g, np.eye(2)).p_success
            expected = ms.helstrom(0.5, 0.5, overlap).p_success
            assert abs(pgm_ps - expected) < 1e-12

    def test_circulant_gram_pgm_is_globally_optimal(self):
        g = circulant_gram_m3()
        ens = ms.ensemble_from_gram(g)
        povm = ms.pgm(g)
        cert = ms.certify_povm(ens, povm)
        assert cert.is_optimal, cert


class TestSuccessProbability:
    def test_trivial(self):
        assert ms.success_probability(identity_gram(5), np.eye(5)).p_success == pytest.approx(1.0)

    def test_equiprobable_overlap_06(self):
        entries = 0.5 * np.array([[1.0, 0.6], [0.6, 1.0]])
        g = ms.GramMatrix(entries + 0j)
        assert abs(ms.success_probability(g, np.eye(2)).p_success - 0.9) < 1e-12

    def test_symmetric_confusions_at_identity(self):
        g = random_gram(4, seed=31)
        report = ms.success_probability(g, np.eye(4))
        assert np.max(np.abs(report.per_outcome - report.per_outcome.T)) < 1e-12

    def test_rows_sum_to_priors_and_total_is_one(self):
        rng = np.random.default_rng(3)
        for seed in range(5):
            g = random_gram(3, seed + 50)
            u = haar_unitary(rng, 3)
            report = ms.success_probability(g, u)
            assert np.max(np.abs(report.per_outcome.sum(axis=1) - g.probs)) < 1e-10
            assert abs(report.per_outcome.sum() - 1.0) < 1e-10

    def test_povm_route_agrees_with_gram_route(self):
        g = random_gram(3, seed=60)
        ens = ms.ensemble_from_gram(g)
        rng = np.random.default_rng(4)
        u = haar_unitary(rng, 3)
        direct = ms.success_probability(g, u)
        via_povm = ms.success_of_povm(ens, ms.povm_from_unitary(g, u, ensemble=ens))
        assert np.max(np.abs(direct.per_outcome - via_povm.per_outcome)) < 1e-10

import numpy as np
import pytest
from hypothesis import given, settings

from cvdistill import conditioning as c
from cvdistill import gaussian as g
from cvdistill import oracle
from cvdistill.errors import InvalidArgument
from cvdistill.fock import gaussian_to_fock, mixture_to_fock

from conftest import covariances, thermal, tmsv_cov


class TestPartition:
    def test_vacuum(self):
        part = c.partition_mode(g.vacuum(2), 1)
        np.testing.assert_array_equal(part.gamma1, 0.5 * np.eye(2))
        np.testing.assert_array_equal(part.m, np.zeros((2, 2)))
        np.testing.assert_array_equal(part.delta, 0.5 * np.eye(2))

    def test_product_state_has_no_cross_block(self):
        V = np.zeros((4, 4))
        V[:2, :2] = g.apply_symplectic(g.vacuum(1), g.squeezer(0.3))
        V[2:, 2:] = thermal(1, 0.8)
        np.testing.assert_array_equal(c.partition_mode(V, 0).m, 0.0)

    @settings(max_examples=30, deadline=None)
    @given(covariances(min_modes=2))
    def test_reassembly_round_trip(self, V):
        part = c.partition_mode(V, 0)
        np.testing.assert_array_equal(part.reassemble(), g.reorder_modes(V, part.order))

    def test_bad_index(self):
        with pytest.raises(InvalidArgument):
            c.partition_mode(g.vacuum(2), 2)


class TestConditionOnVacuum:
    def test_uncorrelated_vacuum(self):
        p, G2 = c.condition_on_vacuum(c.partition_mode(g.vacuum(2), 1))
        assert p == 1.0
        np.testing.assert_array_equal(G2, 0.5 * np.eye(2))

    def test_thermal_detected_mode(self):
        V = np.eye(4) * 0.5
        V[2:, 2:] = thermal(1, 1.0)
        p, _ = c.condition_on_vacuum(c.partition_mode(V, 1))
        # thermal vacuum population 1/(nbar + 1) with nbar = (1 + 1)/2 - 1/2
        nbar = 0.5
        assert p == pytest.approx(1 / (nbar + 1), rel=1e-14)
        assert p == pytest.approx(0.6667, abs=5e-5)

    def test_tmsv_heralds_vacuum(self):
        # projecting one arm of a TMSV on |0> leaves |0> with probability 1/cosh^2 r
        r = 0.3
        p, G2 = c.condition_on_vacuum(c.partition_mode(tmsv_cov(r), 1))
        assert p == pytest.approx(1 / np.cosh(r) ** 2, rel=1e-13)
        np.testing.assert_allclose(G2, 0.5 * np.eye(2), atol=1e-14)
        assert g.purity(G2) <= 1 + 1e-12

    @settings(max_examples=40, deadline=None)
    @given(covariances(min_modes=2))
    def test_schur_complement_is_physical(self, V):
        _, G2 = c.condition_on_vacuum(c.partition_mode(V, V.shape[0] // 2 - 1))
        assert g.is_physical(G2)


class TestPhotonSubtractOne:
    def test_vacuum_gives_empty_outcome(self):
        out = c.photon_subtract_one(g.vacuum(3), 1, 0.9)
        assert out.p_succ == 0.0
        assert out.is_empty

    def test_headline_probability(self, squeezed_headline_state):
        # frozen value, confirmed by the Fock oracle in tests/test_oracle.py
        out = c.photon_subtract_one(squeezed_headline_state, 0, 0.9)
        assert out.p_succ == pytest.approx(9.675838543e-4, rel=1e-8)

    def test_matches_fock_oracle_on_tmsv(self):
        r, T, D = 0.3, 0.9, 8
        p_or, rho_or = oracle.oracle_photon_subtract(oracle.analytic_tmsv(r, D), 0, T)
        out = c.photon_subtract_one(tmsv_cov(r), 0, T)
        assert out.p_succ == pytest.approx(p_or, abs=1e-8)
        np.testing.assert_allclose(mixture_to_fock(out.state, D).data, rho_or.data, atol=1e-6)

    @settings(max_examples=40, deadline=None)
    @given(covariances(max_modes=3))
    def test_weights_and_completeness(self, V):
        n = V.shape[0] // 2
        out = c.photon_subtract_one(V, n - 1, 0.8)
        W = g.apply_symplectic(g.tensor_with_vacuum(V), g.beamsplitter(0.8, n - 1, n, n + 1))
        p_vac, G2 = c.condition_on_vacuum(c.partition_mode(W, n))
        assert p_vac + out.p_succ == pytest.approx(1.0, abs=1e-12)
        assert abs(out.state.weights.sum() - 1.0) <= 1e-12 * max(1.0, np.abs(out.state.weights).sum())
        # the two weights are delta/(delta-1) and -1/(delta-1)
        delta = 1 / p_vac
        np.testing.assert_allclose(out.state.weights, [delta / (delta - 1), -1 / (delta - 1)], rtol=1e-9)
        for _, cov in out.state.terms:
            assert g.is_physical(cov)

    def test_headline_weights_sum_exactly(self, squeezed_headline_state):
        out = c.photon_subtract_one(squeezed_headline_state, 0, 0.9)
        assert abs(out.state.weights.sum() - 1.0) <= 1e-12

    def test_near_unit_transmittance(self):
        out = c.photon_subtract_one(g.symmetric_state(g.StateFamilyParams.unbiased(3, 0.05)), 0, 1 - 1e-9)
        assert out.p_succ < 1e-10

    @pytest.mark.parametrize("T", [0.0, 1.0])
    def test_rejects_degenerate_transmittance(self, T):
        with pytest.raises(InvalidArgument):
            c.photon_subtract_one(tmsv_cov(0.2), 0, T)


class TestPhotonSubtractMany:
    def test_single_mode_matches_one(self, squeezed_headline_state):
        one = c.photon_subtract_one(squeezed_headline_state, 1, 0.9)
        many = c.photon_subtract_many(squeezed_headline_state, [1], 0.9)
        assert many.p_succ == pytest.approx(one.p_succ, rel=1e-12)
        np.testing.assert_allclose(many.state.weights, one.state.weights, rtol=1e-9)
        for (_, a), (_, b) in zip(many.state.terms, one.state.terms):
            np.testing.assert_allclose(a, b, atol=1e-14)

    def test_vacuum(self):
        assert c.photon_subtract_many(g.vacuum(3), [0, 1, 2], 0.9).p_succ == 0.0

    def test_product_state_factorizes(self):
        A = g.apply_symplectic(g.vacuum(1), g.squeezer(0.4))
        B = thermal(1, 0.9)
        V = np.zeros((4, 4))
        V[:2, :2], V[2:, 2:] = A, B
        joint = c.photon_subtract_many(V, [0, 1], 0.85).p_succ
        pa = c.photon_subtract_one(A, 0, 0.85).p_succ
        pb = c.photon_subtract_one(B, 0, 0.85).p_succ
        assert joint == pytest.approx(pa * pb, rel=1e-10)

    def test_matches_sequential_oracle(self):
        # heralding both arms of a TMSV equals two successive Fock-space subtractions
        # the oracle runs at a larger cutoff: its top-level coherences miss input beyond D
        r, T, D_in, D = 0.3, 0.9, 10, 7
        p1, rho1 = oracle.oracle_photon_subtract(oracle.analytic_tmsv(r, D_in), 0, T)
        p2, rho2 = oracle.oracle_photon_subtract(rho1, 1, T)
        out = c.photon_subtract_many(tmsv_cov(r), [0, 1], T)
        assert out.p_succ == pytest.approx(p1 * p2, abs=1e-8)
        sub = rho2.tensor()[:D, :D, :D, :D].reshape(D * D, D * D)
        np.testing.assert_allclose(mixture_to_fock(out.state, D).data, sub, atol=1e-6)
        assert len(out.state.terms) == 4

    def test_loss_reduces_probability(self, headline_state):
        ideal = c.photon_subtract_many(headline_state, [0, 1, 2], 0.9).p_succ
        lossy = c.photon_subtract_many(headline_state, [0, 1, 2], 0.9, eta=0.1).p_succ
        assert 0 < lossy < ideal
        # frozen direct evaluation; far below the (1e-2)^3 estimate at this weak squeezing
        assert np.log10(lossy) == pytest.approx(-10.1272, abs=1e-3)

    def test_duplicate_modes(self):
        with pytest.raises(InvalidArgument):
            c.photon_subtract_many(g.vacuum(2), [0, 0], 0.9)


class TestLossChannel:
    def test_unit_efficiency_is_identity(self, squeezed_headline_state):
        np.testing.assert_allclose(c.loss_channel(squeezed_headline_state, 1, 1.0), squeezed_headline_state, atol=1e-15)

    def test_full_loss_gives_vacuum_block(self):
        V = c.loss_channel(tmsv_cov(0.5), 0, 1e-14)
        np.testing.assert_allclose(V[:2, :2], 0.5 * np.eye(2), atol=1e-12)
        np.testing.assert_allclose(V[:2, 2:], 0.0, atol=1e-6)

    def test_half_loss_on_thermal(self):
        np.testing.assert_allclose(c.loss_channel(thermal(1), 0, 0.5), np.diag([0.75, 0.75]), atol=1e-15)

    @pytest.mark.parametrize("eta", [0.0, 1.2, -0.5])
    def test_range(self, eta):
        with pytest.raises(InvalidArgument):
            c.loss_channel(thermal(1), 0, eta)

    def test_efficiency_on_one_subtraction(self):
        # loss before the detector is a weaker tap: R -> eta R for the click, with extra loss on the kept mode
        V = tmsv_cov(0.4)
        lossy = c.photon_subtract_one(V, 0, 0.9, eta=0.5).p_succ
        ideal = c.photon_subtract_one(V, 0, 0.9).p_succ
        weaker_tap = c.photon_subtract_one(V, 0, 1 - 0.5 * 0.1).p_succ
        assert lossy < ideal
        assert lossy == pytest.approx(weaker_tap, rel=1e-12)


class TestMixtureValidation:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(InvalidArgument):
            c.SignedGaussianMixture(1, ((0.5, g.vacuum(1)),))

    def test_shape_checked(self):
        with pytest.raises(InvalidArgument):
            c.SignedGaussianMixture(2, ((1.0, g.vacuum(1)),))

import numpy as np
import pytest
from scipy.linalg import expm

from cvdistill import oracle
from cvdistill.fock import FockDensityMatrix
from cvdistill.verify import check_delta_arbiter, compare_with_oracle, gamma2_delta

from conftest import tmsv_cov


def number_state(n, D):
    data = np.zeros((D, D), dtype=complex)
    data[n, n] = 1.0
    return FockDensityMatrix(1, D, data)


class TestBeamsplitter:
    def test_unit_transmittance_is_identity(self):
        np.testing.assert_allclose(oracle.bs_fock_matrix(1.0, 5).data, np.eye(25), atol=1e-15)

    def test_single_photon_split(self):
        U = oracle.bs_fock_matrix(0.9, 3).tensor()
        assert abs(U[1, 0, 1, 0]) ** 2 == pytest.approx(0.9, rel=1e-14)
        assert abs(U[0, 1, 1, 0]) ** 2 == pytest.approx(0.1, rel=1e-14)

    @pytest.mark.parametrize("T", [0.1, 0.5, 0.9])
    def test_blocks_unitary(self, T):
        D = 7
        U = oracle.bs_fock_matrix(T, D).data
        for block in oracle.photon_number_blocks(D):
            B = U[np.ix_(block, block)]
            np.testing.assert_allclose(B @ B.conj().T, np.eye(len(block)), atol=1e-12)

    def test_conserves_photon_number(self):
        D = 5
        U = oracle.bs_fock_matrix(0.7, D).tensor()
        for a in range(D):
            for b in range(D):
                for n in range(D):
                    for m in range(D):
                        if a + b != n + m:
                            assert U[a, b, n, m] == 0.0

    def test_generator_exponential(self):
        D, T = 6, 0.6
        a = np.diag(np.sqrt(np.arange(1, D)), 1)
        A, B = np.kron(a, np.eye(D)), np.kron(np.eye(D), a)
        U_exp = expm(np.arccos(np.sqrt(T)) * (A.T @ B - A @ B.T))
        U = oracle.bs_fock_matrix(T, D).data
        idx = [i for blk in oracle.photon_number_blocks(D) for i in blk]
        np.testing.assert_allclose(U[np.ix_(idx, idx)], U_exp[np.ix_(idx, idx)], atol=1e-12)


class TestOracleSubtraction:
    def test_vacuum(self):
        p, rho = oracle.oracle_photon_subtract(number_state(0, 4), 0, 0.9)
        assert p == 0.0 and rho is None

    def test_single_photon(self):
        p, rho = oracle.oracle_photon_subtract(number_state(1, 4), 0, 0.9)
        assert p == pytest.approx(0.1, rel=1e-13)
        np.testing.assert_allclose(rho.data, number_state(0, 4).data, atol=1e-15)

    def test_two_photons(self):
        # |2> -> T|2,0> - sqrt(2TR)|1,1> + R|0,2>; click leaves |1> w.p. 2TR and |0> w.p. R^2
        T, R = 0.9, 0.1
        p, rho = oracle.oracle_photon_subtract(number_state(2, 4), 0, T)
        assert p == pytest.approx(2 * T * R + R**2, rel=1e-13)
        np.testing.assert_allclose(np.diag(rho.data).real[:3], [R**2 / p, 2 * T * R / p, 0.0], atol=1e-14)

    def test_tmsv_equivalence(self):
        dp, drho = compare_with_oracle(tmsv_cov(0.3), 0, 0.9, D_in=8, D_cmp=8)
        assert dp <= 1e-8
        assert drho <= 1e-6

    def test_headline_state_equivalence(self, squeezed_headline_state):
        dp, drho = compare_with_oracle(squeezed_headline_state, 0, 0.9, D_in=8, D_cmp=6)
        assert dp <= 1e-8
        assert drho <= 1e-6

    def test_delta_from_detected_block(self, squeezed_headline_state):
        assert check_delta_arbiter().passed
        p_wrong = gamma2_delta(squeezed_headline_state, 0, 0.9)
        assert p_wrong == pytest.approx(1.3636e-2, rel=1e-3)


class TestClosedForms:
    def test_zero_squeezing_is_vacuum(self):
        np.testing.assert_array_equal(oracle.analytic_smsv(0.0, 4).data, number_state(0, 4).data)
        tm = oracle.analytic_tmsv(0.0, 3).data
        assert tm[0, 0] == 1.0 and np.abs(tm).sum() == 1.0

    def test_tmsv_diagonal(self):
        r, D = 0.4, 6
        lam = np.tanh(r)
        t = oracle.analytic_tmsv(r, D).tensor()
        np.testing.assert_allclose([t[n, n, n, n].real for n in range(D)], (1 - lam**2) * lam ** (2 * np.arange(D)), rtol=1e-13)

    def test_smsv_parity(self):
        rho = oracle.analytic_smsv(0.5, 9).data
        assert np.abs(rho[1::2, :]).max() == 0.0
        assert np.abs(rho[:, 1::2]).max() == 0.0

    def test_smsv_moments(self):
        r = 0.3
        V = oracle.fock_covariance(oracle.analytic_smsv(r, 20))
        np.testing.assert_allclose(V, np.diag([np.exp(-2 * r), np.exp(2 * r)]) / 2, atol=1e-8)

    def test_tmsv_moments(self):
        np.testing.assert_allclose(oracle.fock_covariance(oracle.analytic_tmsv(0.3, 16)), tmsv_cov(0.3), atol=1e-6)

"""Oracle-equivalence checks run by ``cvdistill verify``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import gaussian as g
from . import oracle
from .conditioning import partition_mode, condition_on_vacuum, photon_subtract_one
from .fock import gaussian_to_fock, mixture_to_fock


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def tmsv_cov(r: float) -> np.ndarray:
    c, s = np.cosh(2 * r) / 2, np.sinh(2 * r) / 2
    return np.array([[c, 0, s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, -s, 0, c]])


def headline_state(N: int = 3, r2: float = 0.05, s: float = 0.07) -> np.ndarray:
    V = g.symmetric_state(g.StateFamilyParams.unbiased(N, r2))
    return g.apply_symplectic(V, g.local_squeezers([s] * N))


def check_bs_blocks(T=0.9, D=8) -> Check:
    U = oracle.bs_fock_matrix(T, D).data
    err = max(np.abs(U[np.ix_(b, b)] @ U[np.ix_(b, b)].conj().T - np.eye(len(b))).max() for b in oracle.photon_number_blocks(D))
    return Check("bs_block_unitarity", err <= 1e-12, f"max error {err:.2e} (tol 1e-12)")


def check_bs_generator(T=0.9, D=8) -> Check:
    a = np.diag(np.sqrt(np.arange(1, D)), 1)
    A, B = np.kron(a, np.eye(D)), np.kron(np.eye(D), a)
    theta = np.arccos(np.sqrt(T))
    U_exp = expm(theta * (A.T @ B - A @ B.T))
    U = oracle.bs_fock_matrix(T, D).data
    idx = [i for blk in oracle.photon_number_blocks(D) for i in blk]
    err = np.abs(U_exp[np.ix_(idx, idx)] - U[np.ix_(idx, idx)]).max()
    return Check("bs_matches_generator", err <= 1e-12, f"max error {err:.2e} (tol 1e-12)")


def check_smsv(r=0.3, D=8) -> Check:
    V = np.diag([np.exp(-2 * r), np.exp(2 * r)]) / 2
    err = np.abs(gaussian_to_fock(V, D).data - oracle.analytic_smsv(r, D).data).max()
    return Check("smsv_closed_form", err <= 1e-10, f"max error {err:.2e} (tol 1e-10)")


def check_tmsv(r=0.3, D=8) -> Check:
    err = np.abs(gaussian_to_fock(tmsv_cov(r), D).data - oracle.analytic_tmsv(r, D).data).max()
    return Check("tmsv_closed_form", err <= 1e-10, f"max error {err:.2e} (tol 1e-10)")


def check_vacuum_element(count=100, seed=1234) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(count):
        n = 1 + k % 3
        V = g.random_covariance(n, rng)
        el = gaussian_to_fock(V, 2).data[0, 0]
        worst = max(worst, abs(el - 1 / np.sqrt(np.linalg.det(V + np.eye(2 * n) / 2))))
    return Check("vacuum_element_norm", worst <= 1e-12, f"{count} random states, max error {worst:.2e} (tol 1e-12)")


def compare_with_oracle(V, mode, T, D_in, D_cmp):
    """Return ``(|dp|, max elementwise |d rho|)`` between both routes."""
    n = g.n_modes_of(V)
    p_or, rho_or = oracle.oracle_photon_subtract(gaussian_to_fock(V, D_in), mode, T)
    out = photon_subtract_one(V, mode, T)
    rho_ps = mixture_to_fock(out.state, D_cmp).data
    sub = rho_or.tensor()[(slice(0, D_cmp),) * (2 * n)].reshape(D_cmp**n, D_cmp**n)
    return abs(p_or - out.p_succ), float(np.abs(sub - rho_ps).max())


def check_tmsv_oracle(r=0.3, T=0.9, D=8) -> Check:
    rho_in = oracle.analytic_tmsv(r, D)
    p_or, rho_or = oracle.oracle_photon_subtract(rho_in, 0, T)
    out = photon_subtract_one(tmsv_cov(r), 0, T)
    dp = abs(p_or - out.p_succ)
    drho = np.abs(rho_or.data - mixture_to_fock(out.state, D).data).max()
    ok = dp <= 1e-8 and drho <= 1e-6
    return Check("tmsv_oracle_equivalence", ok, f"|dp|={dp:.2e} (tol 1e-8), max|drho|={drho:.2e} (tol 1e-6)")


def check_headline_state_oracle(T=0.9) -> Check:
    dp, drho = compare_with_oracle(headline_state(), 0, T, D_in=8, D_cmp=6)
    ok = dp <= 1e-8 and drho <= 1e-6
    return Check("headline_state_oracle_equivalence", ok, f"|dp|={dp:.2e} (tol 1e-8), max|drho|={drho:.2e} (tol 1e-6), levels<6 of D=8")


def gamma2_delta(V, mode, T) -> float:
    """The probability obtained by plugging the full conditioned block into the delta formula."""
    n = g.n_modes_of(V)
    W = g.apply_symplectic(g.tensor_with_vacuum(V), g.beamsplitter(T, mode, n, n + 1))
    _, gamma2 = condition_on_vacuum(partition_mode(W, n))
    d = np.sqrt(np.linalg.det(gamma2 + np.eye(2 * n) / 2))
    return (d - 1) / d


def check_delta_arbiter(T=0.9) -> Check:
    details, ok = [], True
    for label, V, D in (("tmsv", tmsv_cov(0.3), 8), ("headline", headline_state(), 7)):
        n = g.n_modes_of(V)
        p_or, _ = oracle.oracle_photon_subtract(gaussian_to_fock(V, D), 0, T)
        p_delta = photon_subtract_one(V, 0, T).p_succ
        p_gamma = gamma2_delta(V, 0, T)
        good = abs(p_or - p_delta) <= 1e-8 and abs(p_or - p_gamma) > 1e-3 * p_or
        ok &= good
        details.append(f"{label}: oracle={p_or:.6e} delta-block={p_delta:.6e} gamma2-block={p_gamma:.6e}")
    return Check("delta_from_detected_block", ok, "; ".join(details))


CHECKS = (
    check_bs_blocks,
    check_bs_generator,
    check_smsv,
    check_tmsv,
    check_vacuum_element,
    check_tmsv_oracle,
    check_headline_state_oracle,
    check_delta_arbiter,
)


def run_all():
    return [check() for check in CHECKS]

"""Brute-force Fock-space reference computations.

Nothing here goes through covariance matrices or the transfer kernel:
photon subtraction is evaluated literally as
``Tr_B[U (rho x |0><0|) U^dagger (I x (I - |0><0|))]`` in a truncated
number basis, and squeezed states come from their textbook expansions.
Only the :class:`FockDensityMatrix` container is shared with the rest
of the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial, sqrt

import numpy as np

from .errors import InvalidArgument
from .fock import FockDensityMatrix

ZERO_PROB = 1e-14


@dataclass(frozen=True)
class FockUnitary:
    """``<a, b|U|n, m>`` on two modes, flattened as ``index = a*D + b``."""

    modes: tuple
    cutoff: int
    data: np.ndarray

    def tensor(self) -> np.ndarray:
        D = self.cutoff
        return self.data.reshape(D, D, D, D)


def bs_fock_matrix(T: float, D: int, modes=(0, 1)) -> FockUnitary:
    """Two-mode beamsplitter ``exp[theta (a^dag b - a b^dag)]``, ``cos(theta) = sqrt(T)``.

    Under it ``a^dag -> sqrt(T) a^dag - sqrt(R) b^dag`` and
    ``b^dag -> sqrt(R) a^dag + sqrt(T) b^dag``; expanding the binomials
    gives the matrix elements.  Outputs beyond the cutoff are dropped, so
    only blocks with ``n + m < D`` are complete.
    """
    if not 0 < T <= 1:
        raise InvalidArgument(f"transmittance must lie in (0, 1], got {T}")
    if D < 1:
        raise InvalidArgument("cutoff must be >= 1")
    t, r = sqrt(T), sqrt(1.0 - T)
    U = np.zeros((D, D, D, D))
    for n in range(D):
        for m in range(D):
            norm = sqrt(factorial(n) * factorial(m))
            for j in range(n + 1):
                for k in range(m + 1):
                    a, b = j + k, n + m - j - k
                    if a >= D or b >= D:
                        continue
                    amp = comb(n, j) * comb(m, k) * t**j * (-r) ** (n - j) * r**k * t ** (m - k)
                    U[a, b, n, m] += amp * sqrt(factorial(a) * factorial(b)) / norm
    return FockUnitary(tuple(modes), D, U.reshape(D * D, D * D))


def photon_number_blocks(D: int):
    """Flat two-mode indices grouped by total photon number ``< D``."""
    return [[a * D + (n - a) for a in range(n + 1)] for n in range(D)]


def oracle_photon_subtract(rho_in: FockDensityMatrix, mode: int, T: float):
    """Heralded state after tapping ``mode`` and clicking an on/off detector.

    Returns ``(p_succ, rho_out)``; ``rho_out`` is ``None`` when the click
    probability is below ``1e-14``.
    """
    n, D = rho_in.n_modes, rho_in.cutoff
    if not 0 <= mode < n:
        raise InvalidArgument(f"mode index {mode} out of range for {n} modes")
    # rho x |0><0| with the ancilla appended as mode n
    ket0 = np.zeros(D)
    ket0[0] = 1.0
    rho = np.multiply.outer(rho_in.tensor(), np.outer(ket0, ket0))
    rho = np.moveaxis(rho, 2 * n, n)  # layout: kets (n+1), bras (n+1)
    kets = list(range(n + 1))
    bras = list(range(n + 1, 2 * n + 2))

    U = bs_fock_matrix(T, D).tensor()
    pair_ket = (kets[mode], kets[n])
    pair_bra = (bras[mode], bras[n])
    # U on the ket side
    rho = np.tensordot(U, rho, axes=([2, 3], list(pair_ket)))
    rho = np.moveaxis(rho, [0, 1], list(pair_ket))
    # U^dagger on the bra side
    rho = np.tensordot(rho, U.conj(), axes=(list(pair_bra), [2, 3]))
    rho = np.moveaxis(rho, [-2, -1], list(pair_bra))

    # (I x Pi_on) then Tr_B: keep ancilla levels 1..D-1 on the diagonal
    rho = np.moveaxis(rho, [kets[n], bras[n]], [-2, -1])
    kept = sum(rho[..., b, b] for b in range(1, D))
    kept = kept.reshape(D**n, D**n)
    p = float(np.trace(kept).real)
    if p < ZERO_PROB:
        return 0.0, None
    return p, FockDensityMatrix(n, D, kept / p)


def analytic_smsv(r: float, D: int) -> FockDensityMatrix:
    """Squeezed vacuum ``exp[r (a^2 - a^dag 2) / 2]|0>``.

    Amplitudes ``(-tanh r)^n sqrt((2n)!) / (2^n n! sqrt(cosh r))`` on
    ``|2n>``; for ``r > 0`` the x quadrature is squeezed.
    """
    psi = np.zeros(D)
    for n in range(0, (D - 1) // 2 + 1):
        psi[2 * n] = (-np.tanh(r)) ** n * sqrt(factorial(2 * n)) / (2**n * factorial(n))
    psi /= np.sqrt(np.cosh(r))
    return FockDensityMatrix(1, D, np.outer(psi, psi).astype(complex))


def analytic_tmsv(r: float, D: int) -> FockDensityMatrix:
    """Two-mode squeezed vacuum ``sqrt(1 - l^2) sum_n l^n |n, n>``, ``l = tanh r``.

    Its covariance has ``+sinh(2r)/2`` on the x1-x2 entry and
    ``-sinh(2r)/2`` on the p1-p2 entry.
    """
    lam = np.tanh(r)
    psi = np.zeros((D, D))
    for n in range(D):
        psi[n, n] = lam**n
    psi = psi.ravel() * np.sqrt(1 - lam**2)
    return FockDensityMatrix(2, D, np.outer(psi, psi).astype(complex))


def fock_covariance(rho: FockDensityMatrix) -> np.ndarray:
    """Symmetrized quadrature second moments ``Re Tr[rho {X_i, X_j}] / 2``.

    Ladder operators are built one level above the cutoff so moments of
    the truncated matrix are exact.
    """
    n, D = rho.n_modes, rho.cutoff
    E = D + 1
    a = np.diag(np.sqrt(np.arange(1, E)), 1)
    x = (a + a.T) / np.sqrt(2)
    p = (a - a.T) / (1j * np.sqrt(2))
    # pad rho with one empty level per mode
    t = np.zeros((E,) * (2 * n), dtype=complex)
    t[(slice(0, D),) * (2 * n)] = rho.tensor()
    big = t.reshape(E**n, E**n)

    def embed(op, k):
        out = np.eye(1)
        for j in range(n):
            out = np.kron(out, op if j == k else np.eye(E))
        return out

    quads = [embed(q, k) for k in range(n) for q in (x, p)]
    V = np.empty((2 * n, 2 * n))
    for i, A in enumerate(quads):
        for j, B in enumerate(quads):
            V[i, j] = np.trace(big @ (A @ B + B @ A)).real / 2
    return V

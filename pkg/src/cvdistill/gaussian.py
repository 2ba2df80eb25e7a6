"""Zero-mean Gaussian states in the covariance-matrix picture.

Covariance matrices are plain ``(2N, 2N)`` float arrays in mode-major
ordering ``(x1, p1, x2, p2, ...)`` with vacuum equal to ``I/2``.
Symplectic transforms are arrays of the same shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, InvalidState

PHYSICAL_TOL = 1e-10


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form ``Omega`` for ``n_modes`` modes."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def n_modes_of(V: np.ndarray) -> int:
    V = np.asarray(V)
    if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] % 2:
        raise InvalidArgument(f"expected a (2N, 2N) matrix, got shape {V.shape}")
    return V.shape[0] // 2


def is_physical(V: np.ndarray, tol: float = PHYSICAL_TOL) -> bool:
    """Check the uncertainty relation ``V + i Omega / 2 >= 0``."""
    n = n_modes_of(V)
    if not np.allclose(V, V.T, atol=1e-12, rtol=0):
        return False
    H = V + 0.5j * symplectic_form(n)
    return bool(np.linalg.eigvalsh(H).min() >= -tol)


def check_physical(V: np.ndarray) -> np.ndarray:
    V = np.asarray(V, dtype=float)
    if not is_physical(V):
        raise InvalidState("covariance matrix violates the uncertainty relation")
    return V


def is_symplectic(S: np.ndarray, tol: float = 1e-12) -> bool:
    n = n_modes_of(S)
    omega = symplectic_form(n)
    return bool(np.abs(S @ omega @ S.T - omega).max() <= tol)


@dataclass(frozen=True)
class StateFamilyParams:
    """Parameters of the symmetric N-partite entangled family.

    ``a, b, c, d`` are the variances/covariances of the 2x2 diagonal
    blocks and are recomputed on access.
    """

    N: int
    r1: float
    r2: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise InvalidArgument(f"N must be an integer >= 2, got {self.N}")
        if not (np.isfinite(self.r1) and np.isfinite(self.r2)):
            raise InvalidArgument("squeezing parameters must be finite")

    @property
    def a(self) -> float:
        return (np.exp(2 * self.r1) + (self.N - 1) * np.exp(-2 * self.r2)) / (2 * self.N)

    @property
    def b(self) -> float:
        return (np.exp(-2 * self.r1) + (self.N - 1) * np.exp(2 * self.r2)) / (2 * self.N)

    @property
    def c(self) -> float:
        return (np.exp(2 * self.r1) - np.exp(-2 * self.r2)) / (2 * self.N)

    @property
    def d(self) -> float:
        return (np.exp(-2 * self.r1) - np.exp(2 * self.r2)) / (2 * self.N)

    @classmethod
    def unbiased(cls, N: int, r2: float) -> "StateFamilyParams":
        return cls(N=N, r1=unbiased_r1(r2, N), r2=r2)


def vacuum(N: int) -> np.ndarray:
    if int(N) != N or N < 1:
        raise InvalidArgument(f"number of modes must be >= 1, got {N}")
    return 0.5 * np.eye(2 * int(N))


def symmetric_state(params: StateFamilyParams) -> np.ndarray:
    """Covariance matrix of the permutation-symmetric N-partite state.

    Diagonal 2x2 blocks are ``diag(a, b)``, every off-diagonal block is
    ``diag(c, d)``.
    """
    N = params.N
    alpha = np.diag([params.a, params.b])
    eps = np.diag([params.c, params.d])
    return np.kron(np.ones((N, N)), eps) + np.kron(np.eye(N), alpha - eps)


def unbiased_r1(r2: float, N: int) -> float:
    """The ``r1`` that balances the x and p variances of each mode.

    Raises
    ------
    InvalidArgument
        If ``r2 <= 0`` (the closed form takes a log of a non-positive
        number) or ``N < 2``.
    """
    if N < 2:
        raise InvalidArgument(f"N must be >= 2, got {N}")
    if not r2 > 0:
        raise InvalidArgument(f"unbiased r1 requires r2 > 0, got {r2}")
    x = (N - 1) * np.sinh(2 * r2)
    return float(0.5 * np.log(x) + 0.5 * np.log(np.sqrt(1 + x**-2) + 1))


def squeezer(s: float) -> np.ndarray:
    """Single-mode squeezer ``diag(e^s, e^-s)`` acting on ``(x, p)``."""
    if not np.isfinite(s):
        raise InvalidArgument("squeezing must be finite")
    return np.diag([np.exp(s), np.exp(-s)])


def local_squeezers(s_values) -> np.ndarray:
    """Direct sum of single-mode squeezers, one per mode."""
    s_values = np.atleast_1d(np.asarray(s_values, dtype=float))
    S = np.zeros((2 * len(s_values),) * 2)
    for k, s in enumerate(s_values):
        S[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = squeezer(s)
    return S


def beamsplitter(T: float, mode_i: int, mode_j: int, N: int) -> np.ndarray:
    """Beamsplitter of transmittance ``T`` coupling ``mode_i`` and ``mode_j``.

    On the two coupled blocks the matrix is
    ``[[sqrt(T) I, -sqrt(R) I], [sqrt(R) I, sqrt(T) I]]`` with ``R = 1 - T``.
    """
    if not 0 < T <= 1:
        raise InvalidArgument(f"transmittance must lie in (0, 1], got {T}")
    if mode_i == mode_j:
        raise InvalidArgument("beamsplitter needs two distinct modes")
    for m in (mode_i, mode_j):
        if not 0 <= m < N:
            raise InvalidArgument(f"mode index {m} out of range for {N} modes")
    t, r = np.sqrt(T), np.sqrt(1 - T)
    B = np.eye(2 * N)
    i = slice(2 * mode_i, 2 * mode_i + 2)
    j = slice(2 * mode_j, 2 * mode_j + 2)
    B[i, i] = t * np.eye(2)
    B[i, j] = -r * np.eye(2)
    B[j, i] = r * np.eye(2)
    B[j, j] = t * np.eye(2)
    return B


def apply_symplectic(V: np.ndarray, S: np.ndarray) -> np.ndarray:
    V = np.asarray(V, dtype=float)
    S = np.asarray(S, dtype=float)
    if V.shape != S.shape:
        raise InvalidArgument(f"dimension mismatch: V {V.shape} vs S {S.shape}")
    out = S @ V @ S.T
    return 0.5 * (out + out.T)


def tensor_with_vacuum(V: np.ndarray) -> np.ndarray:
    """Append one vacuum mode as the last mode."""
    n = n_modes_of(V)
    out = 0.5 * np.eye(2 * n + 2)
    out[: 2 * n, : 2 * n] = V
    return out


def purity(V: np.ndarray) -> float:
    n = n_modes_of(V)
    return float(1.0 / (2**n * np.sqrt(np.linalg.det(V))))


def symplectic_eigenvalues(V: np.ndarray) -> np.ndarray:
    """Williamson spectrum of ``V``, sorted ascending (N values)."""
    n = n_modes_of(V)
    ev = np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ V))
    # eigenvalues of i*Omega*V come in +-nu pairs
    return np.sort(ev)[::2]


def reorder_modes(V: np.ndarray, order) -> np.ndarray:
    """Permute mode blocks of ``V`` so that new mode ``k`` is old ``order[k]``."""
    idx = np.array([[2 * m, 2 * m + 1] for m in order]).ravel()
    return np.asarray(V)[np.ix_(idx, idx)]


def _xxpp_to_xpxp(n: int) -> np.ndarray:
    perm = np.array([[k, n + k] for k in range(n)]).ravel()
    return np.eye(2 * n)[perm]


def passive_symplectic(U: np.ndarray) -> np.ndarray:
    """Orthogonal symplectic matrix of an interferometer ``U`` (mode-major)."""
    n = U.shape[0]
    O = np.block([[U.real, -U.imag], [U.imag, U.real]])
    P = _xxpp_to_xpxp(n)
    return P @ O @ P.T


def _haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_covariance(n: int, rng: np.random.Generator, max_squeeze: float = 0.5, max_thermal: float = 0.5) -> np.ndarray:
    """Random physical covariance ``S diag(nu) S^T`` via Bloch-Messiah factors."""
    u1, u2 = _haar_unitary(n, rng), _haar_unitary(n, rng)
    Z = local_squeezers(rng.uniform(-max_squeeze, max_squeeze, n))
    S = passive_symplectic(u1) @ Z @ passive_symplectic(u2)
    nu = 0.5 + rng.uniform(0, max_thermal, n)
    thermal = np.diag(np.repeat(nu, 2))
    V = S @ thermal @ S.T
    return 0.5 * (V + V.T)

"""Phase-space to Fock-space transfer for zero-mean Gaussian states.

Matrix elements of a Gaussian state follow from the Taylor coefficients
of a generating function

    F(t, t') = exp[(t, t') R (t, t')^T / 2] / sqrt(det(V + I/2)),

    <k|rho|m> = coeff_{t^k t'^m}(F) * sqrt(prod k! prod m!).

The coefficients are obtained by truncated polynomial exponentiation:
the quadratic form is a sum of commuting monomials ``q u_a u_b`` so
``exp`` factorizes into a product of one-monomial exponentials, each
applied to a dense coefficient array capped at degree ``D-1`` per
variable.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from . import gaussian as g
from .errors import CapacityError, InvalidArgument

DEFAULT_MAX_DIM = 10**6
MAX_DIM_ENV = "CVDISTILL_MAX_DIM"


def max_dim() -> int:
    """Cap on the Fock matrix dimension ``D**N``; ``CVDISTILL_MAX_DIM`` overrides."""
    value = os.environ.get(MAX_DIM_ENV)
    return int(value) if value else DEFAULT_MAX_DIM


@dataclass(frozen=True)
class FockDensityMatrix:
    """Density matrix on ``n_modes`` modes truncated at ``cutoff`` levels each.

    Rows and columns are multi-indices ``(k1, ..., kN)`` in lexicographic
    order.  ``asymmetry`` records ``max|rho - rho^dagger|`` observed before
    Hermitian symmetrization, when that was applied.
    """

    n_modes: int
    cutoff: int
    data: np.ndarray
    asymmetry: float = 0.0

    def __post_init__(self):
        dim = self.cutoff**self.n_modes
        if self.data.shape != (dim, dim):
            raise InvalidArgument(
                f"expected ({dim}, {dim}) data for {self.n_modes} modes at cutoff {self.cutoff}, "
                f"got {self.data.shape}"
            )

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def tensor(self) -> np.ndarray:
        """View as a ``(D,)*2N`` array indexed ``[k1..kN, m1..mN]``."""
        return self.data.reshape((self.cutoff,) * (2 * self.n_modes))

    def element(self, ket, bra) -> complex:
        return complex(self.tensor()[tuple(ket) + tuple(bra)])

    def hermitian_error(self) -> float:
        return float(np.abs(self.data - self.data.conj().T).max())

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_modes": self.n_modes,
                "cutoff": self.cutoff,
                "index_order": "lexicographic",
                "real": self.data.real.tolist(),
                "imag": self.data.imag.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "FockDensityMatrix":
        obj = json.loads(text)
        data = np.array(obj["real"]) + 1j * np.array(obj["imag"])
        return cls(obj["n_modes"], obj["cutoff"], data)


@dataclass(frozen=True)
class TransferKernel:
    n_modes: int
    r_matrix: np.ndarray
    norm: float


def _mode_permutation(n: int) -> np.ndarray:
    """``P`` mapping ``(x1, p1, ..., xN, pN)`` to ``(x1..xN, p1..pN)``."""
    P = np.zeros((2 * n, 2 * n))
    for k in range(n):
        P[k, 2 * k] = 1.0
        P[n + k, 2 * k + 1] = 1.0
    return P


def ladder_map(n: int) -> np.ndarray:
    """``L_N`` with ``(a^dagger, -a) = i L_N X``."""
    block = np.array([[-1j, -1.0], [1j, -1.0]]) / np.sqrt(2)
    return np.kron(block, np.eye(n)) @ _mode_permutation(n)


def build_kernel(V: np.ndarray) -> TransferKernel:
    """Quadratic-form kernel ``R`` and normalization of the generating function.

    ``R = sx + sz L* (V + I/2)^-1 L^dagger sz``.  Since the vacuum has
    ``R = 0``, i.e. ``sx = -sz L* L^dagger sz``, it is evaluated as
    ``-sz L* (V + I/2)^-1 (V - I/2) L^dagger sz``, which is exact for
    vacuum and avoids cancellation for near-vacuum states.
    """
    n = g.n_modes_of(V)
    V = np.asarray(V, dtype=float)
    A = V + 0.5 * np.eye(2 * n)
    L = ladder_map(n)
    sz = np.kron(np.diag([1.0, -1.0]), np.eye(n))
    excess = V - 0.5 * np.eye(2 * n)
    R = -sz @ L.conj() @ np.linalg.solve(A, excess) @ L.conj().T @ sz
    R = 0.5 * (R + R.T)
    return TransferKernel(n, R, float(1.0 / np.sqrt(np.linalg.det(A))))


def _check_capacity(n: int, D: int) -> None:
    if int(D) != D or D < 1:
        raise InvalidArgument(f"cutoff must be a positive integer, got {D}")
    cap = max_dim()
    if D**n > cap:
        raise CapacityError(f"Fock dimension {D}**{n} = {D**n} exceeds the cap {cap}")


def exp_quadratic_coefficients(R: np.ndarray, D: int) -> np.ndarray:
    """Taylor coefficients of ``exp(u R u^T / 2)`` up to degree ``D-1`` per variable.

    Returns a complex array of shape ``(D,)*len(R)``; entry ``[k]`` is the
    coefficient of ``prod u_a^{k_a}``.
    """
    nv = R.shape[0]
    c = np.zeros((D,) * nv, dtype=complex)
    c[(0,) * nv] = 1.0
    for a in range(nv):
        for b in range(a, nv):
            q = 0.5 * R[a, a] if a == b else R[a, b]
            if q == 0:
                continue
            shift = 2 if a == b else 1
            out = c.copy()
            for j in range(1, D):
                if shift * j > D - 1:
                    break
                src = [slice(None)] * nv
                dst = [slice(None)] * nv
                src[a] = slice(0, D - shift * j)
                dst[a] = slice(shift * j, D)
                if a != b:
                    src[b] = slice(0, D - j)
                    dst[b] = slice(j, D)
                out[tuple(dst)] += (q**j / math.factorial(j)) * c[tuple(src)]
            c = out
    return c


def _sqrt_factorial_weights(c: np.ndarray, D: int) -> np.ndarray:
    f = np.sqrt([float(math.factorial(k)) for k in range(D)])
    for axis in range(c.ndim):
        shape = [1] * c.ndim
        shape[axis] = D
        c = c * f.reshape(shape)
    return c


def _gaussian_elements(V: np.ndarray, D: int) -> np.ndarray:
    kernel = build_kernel(V)
    n = kernel.n_modes
    c = exp_quadratic_coefficients(kernel.r_matrix, D)
    c = _sqrt_factorial_weights(c, D) * kernel.norm
    return c.reshape(D**n, D**n)


def gaussian_to_fock(V: np.ndarray, D: int) -> FockDensityMatrix:
    """Fock matrix elements ``<k|rho|m>`` with every ``k_i, m_i < D``."""
    n = g.n_modes_of(V)
    _check_capacity(n, D)
    return FockDensityMatrix(n, D, _gaussian_elements(V, D))


def mixture_to_fock(mix, D: int) -> FockDensityMatrix:
    """Weighted sum of the Fock images of a signed Gaussian mixture, symmetrized."""
    _check_capacity(mix.n_modes, D)
    data = sum(w * _gaussian_elements(V, D) for w, V in mix.terms)
    asym = float(np.abs(data - data.conj().T).max())
    data = 0.5 * (data + data.conj().T)
    return FockDensityMatrix(mix.n_modes, D, data, asymmetry=asym)


def truncation_deficit(rho: FockDensityMatrix) -> float:
    return 1.0 - rho.trace

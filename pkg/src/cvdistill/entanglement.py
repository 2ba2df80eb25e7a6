"""Logarithmic negativity of Fock-space and Gaussian states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gaussian as g
from .errors import InvalidArgument, InvalidState
from .fock import FockDensityMatrix

HERMITIAN_TOL = 1e-8
# log base used throughout; fixed by reproducing the 3-mode headline value
LOG_BASE = 2.0


@dataclass(frozen=True)
class Bipartition:
    side_a: frozenset
    side_b: frozenset

    def __post_init__(self):
        a, b = frozenset(self.side_a), frozenset(self.side_b)
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)
        if not a or not b:
            raise InvalidArgument("both sides of a bipartition must be non-empty")
        if a & b:
            raise InvalidArgument(f"sides overlap on modes {sorted(a & b)}")

    @property
    def n_modes(self) -> int:
        return len(self.side_a) + len(self.side_b)

    def validate(self, n_modes: int) -> None:
        if self.side_a | self.side_b != frozenset(range(n_modes)):
            raise InvalidArgument(f"bipartition {self} does not cover modes 0..{n_modes - 1}")

    @classmethod
    def single(cls, mode: int, n_modes: int) -> "Bipartition":
        """Cut ``{mode} | rest``."""
        return cls(frozenset([mode]), frozenset(range(n_modes)) - {mode})

    def __str__(self) -> str:
        return f"{sorted(self.side_a)}|{sorted(self.side_b)}"


def partial_transpose(rho: FockDensityMatrix, cut: Bipartition) -> np.ndarray:
    """Swap ket and bra indices of every side-A mode."""
    n = rho.n_modes
    cut.validate(n)
    perm = list(range(2 * n))
    for m in cut.side_a:
        perm[m], perm[m + n] = perm[m + n], perm[m]
    return rho.tensor().transpose(perm).reshape(rho.dim, rho.dim)


def trace_norm_pt(rho: FockDensityMatrix, cut: Bipartition) -> float:
    """Trace norm of the partial transpose of the trace-normalized state."""
    err = rho.hermitian_error()
    if err > HERMITIAN_TOL:
        raise InvalidState(f"density matrix is not Hermitian (max deviation {err:.3g})")
    tr = rho.trace
    if not tr > 0:
        raise InvalidState(f"density matrix has non-positive trace {tr}")
    pt = partial_transpose(rho, cut) / tr
    pt = 0.5 * (pt + pt.conj().T)
    return float(np.abs(np.linalg.eigvalsh(pt)).sum())


def log_negativity(rho: FockDensityMatrix, cut: Bipartition, base: float = LOG_BASE) -> float:
    """``log(||rho^T_A||_1)`` of ``rho / tr(rho)``, clipped at zero."""
    return max(0.0, float(np.log(trace_norm_pt(rho, cut)) / np.log(base)))


def gaussian_log_negativity(V: np.ndarray, cut: Bipartition, base: float = LOG_BASE) -> float:
    """Log-negativity of a Gaussian state from the partially transposed spectrum."""
    n = g.n_modes_of(V)
    cut.validate(n)
    flip = np.ones(2 * n)
    for m in cut.side_a:
        flip[2 * m + 1] = -1.0
    Vt = flip[:, None] * np.asarray(V, dtype=float) * flip[None, :]
    nu = g.symplectic_eigenvalues(Vt)
    return float(sum(max(0.0, -np.log(2 * x) / np.log(base)) for x in nu))

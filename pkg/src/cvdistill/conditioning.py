"""On/off-detector photon subtraction on Gaussian states.

A "click" on an on/off detector is the projector ``I - |0><0|``.  Both
terms act on Gaussian states in closed form: the identity leaves the
reduced covariance untouched, the vacuum projection is a Schur
complement.  The heralded state is therefore a signed mixture of
Gaussian states.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import gaussian as g
from .errors import InvalidArgument

WEIGHT_TOL = 1e-12
# below this the heralding event is treated as impossible
ZERO_PROB = 1e-15


@dataclass(frozen=True)
class Partition:
    """``V = [[gamma1, m], [m.T, delta]]`` after moving detected modes last."""

    gamma1: np.ndarray
    m: np.ndarray
    delta: np.ndarray
    order: tuple

    def reassemble(self) -> np.ndarray:
        top = np.hstack([self.gamma1, self.m])
        bottom = np.hstack([self.m.T, self.delta])
        return np.vstack([top, bottom])


@dataclass(frozen=True)
class SignedGaussianMixture:
    """Real-weighted combination of zero-mean Gaussian states.

    Weights may be negative but must sum to one.  Terms are stored as
    given; equal covariances are not merged.
    """

    n_modes: int
    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple((float(w), np.asarray(V, dtype=float)) for w, V in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise InvalidArgument("a mixture needs at least one term")
        for _, V in terms:
            if V.shape != (2 * self.n_modes, 2 * self.n_modes):
                raise InvalidArgument(f"term of shape {V.shape} in {self.n_modes}-mode mixture")
        total = sum(w for w, _ in terms)
        # cancellation between large signed weights limits the attainable accuracy
        scale = max(1.0, sum(abs(w) for w, _ in terms))
        if abs(total - 1.0) > WEIGHT_TOL * scale:
            raise InvalidArgument(f"mixture weights sum to {total}, expected 1")

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.terms])

    @classmethod
    def single(cls, V: np.ndarray) -> "SignedGaussianMixture":
        V = np.asarray(V, dtype=float)
        return cls(V.shape[0] // 2, ((1.0, V),))


@dataclass(frozen=True)
class DistillOutcome:
    """Heralding probability and the normalized conditional state.

    ``state`` is ``None`` for the zero-probability outcome.
    """

    p_succ: float
    state: SignedGaussianMixture | None

    @property
    def is_empty(self) -> bool:
        return self.state is None


def partition_modes(V: np.ndarray, detected) -> Partition:
    n = g.n_modes_of(V)
    detected = list(detected)
    if len(set(detected)) != len(detected):
        raise InvalidArgument("detected modes must be distinct")
    for m in detected:
        if not 0 <= m < n:
            raise InvalidArgument(f"mode index {m} out of range for {n} modes")
    kept = [m for m in range(n) if m not in detected]
    order = tuple(kept + detected)
    W = g.reorder_modes(V, order)
    k = 2 * len(kept)
    return Partition(W[:k, :k], W[:k, k:], W[k:, k:], order)


def partition_mode(V: np.ndarray, detected_mode: int) -> Partition:
    return partition_modes(V, [detected_mode])


def vacuum_exponent(delta: np.ndarray) -> float:
    """``q = log(det(delta + I/2)) / 2`` so that the vacuum overlap is ``exp(-q)``.

    Evaluated from the excess ``delta - I/2`` with ``log1p`` to keep
    precision when the detected modes are close to vacuum.
    """
    excess = delta - 0.5 * np.eye(delta.shape[0])
    return float(0.5 * np.log1p(np.linalg.eigvalsh(0.5 * (excess + excess.T))).sum())


def condition_on_vacuum(part: Partition) -> tuple[float, np.ndarray]:
    """Project the detected block onto vacuum.

    Returns the vacuum probability ``1/sqrt(det(delta + I/2))`` and the
    Schur complement ``gamma1 - m (delta + I/2)^-1 m.T``.
    """
    A = part.delta + 0.5 * np.eye(part.delta.shape[0])
    gamma2 = part.gamma1 - part.m @ np.linalg.solve(A, part.m.T)
    return float(np.exp(-vacuum_exponent(part.delta))), 0.5 * (gamma2 + gamma2.T)


def _with_ancillas(V: np.ndarray, modes, T: float) -> np.ndarray:
    """Append one vacuum ancilla per mode and tap each mode with a beamsplitter."""
    if not 0 < T < 1:
        raise InvalidArgument(f"transmittance must lie in (0, 1) for subtraction, got {T}")
    n = g.n_modes_of(V)
    W = np.asarray(V, dtype=float)
    for k, mode in enumerate(modes):
        if not 0 <= mode < n:
            raise InvalidArgument(f"mode index {mode} out of range for {n} modes")
        W = g.tensor_with_vacuum(W)
        W = g.apply_symplectic(W, g.beamsplitter(T, mode, n + k, n + k + 1))
    return W


def photon_subtract_one(V: np.ndarray, mode: int, T: float, eta: float = 1.0) -> DistillOutcome:
    """Tap ``mode`` with a beamsplitter of transmittance ``T`` and herald a click.

    The conditional state is ``delta/(delta-1) rho(G1) - 1/(delta-1) rho(G2)``
    with ``delta = sqrt(det(Delta + I/2))`` taken over the ancilla block,
    and the heralding probability is ``(delta-1)/delta``.  ``eta < 1``
    inserts a loss channel between the beamsplitter and the detector.
    """
    n = g.n_modes_of(V)
    W = _with_ancillas(V, [mode], T)
    if eta != 1.0:
        W = loss_channel(W, n, eta)
    part = partition_mode(W, n)
    p_vac, gamma2 = condition_on_vacuum(part)
    # delta = exp(q); (delta - 1)/delta = -expm1(-q)
    p_succ = -np.expm1(-vacuum_exponent(part.delta))
    if p_succ <= ZERO_PROB:
        return DistillOutcome(0.0, None)
    terms = ((1.0 / p_succ, part.gamma1), (-p_vac / p_succ, gamma2))
    return DistillOutcome(float(p_succ), SignedGaussianMixture(n, terms))


def photon_subtract_many(V: np.ndarray, modes, T: float, eta: float = 1.0) -> DistillOutcome:
    """Herald a click on every listed mode's detector simultaneously.

    The product of click projectors is expanded by inclusion-exclusion
    over subsets of detectors; each subset contributes one vacuum
    conditioning.  ``eta`` is the efficiency applied in front of every
    detector.
    """
    modes = list(modes)
    if not modes or len(set(modes)) != len(modes):
        raise InvalidArgument("modes must be a non-empty set of distinct indices")
    n = g.n_modes_of(V)
    W = _with_ancillas(V, modes, T)
    ancillas = list(range(n, n + len(modes)))
    if eta != 1.0:
        for a in ancillas:
            W = loss_channel(W, a, eta)
    base = partition_modes(W, ancillas)
    gamma1 = base.gamma1
    raw = [(1.0, gamma1)]
    # sum of (-1)^|S| (exp(-q_S) - 1); the -1s cancel over all subsets
    p_succ = 0.0
    for size in range(1, len(modes) + 1):
        for subset in itertools.combinations(ancillas, size):
            # ancillas outside the subset are traced out
            Vs = g.reorder_modes(W, list(range(n)) + list(subset))
            part = partition_modes(Vs, list(range(n, n + size)))
            p_vac, gamma2 = condition_on_vacuum(part)
            sign = (-1) ** size
            raw.append((sign * p_vac, gamma2))
            p_succ += sign * np.expm1(-vacuum_exponent(part.delta))
    if p_succ <= ZERO_PROB:
        return DistillOutcome(0.0, None)
    terms = tuple((w / p_succ, G) for w, G in raw)
    return DistillOutcome(float(p_succ), SignedGaussianMixture(n, terms))


def loss_channel(V: np.ndarray, mode: int, eta: float) -> np.ndarray:
    """Pure-loss channel of transmissivity ``eta`` on one mode."""
    if not 0 < eta <= 1:
        raise InvalidArgument(f"efficiency must lie in (0, 1], got {eta}")
    n = g.n_modes_of(V)
    if not 0 <= mode < n:
        raise InvalidArgument(f"mode index {mode} out of range for {n} modes")
    X = np.eye(2 * n)
    Y = np.zeros((2 * n, 2 * n))
    blk = slice(2 * mode, 2 * mode + 2)
    X[blk, blk] *= np.sqrt(eta)
    Y[blk, blk] = 0.5 * (1 - eta) * np.eye(2)
    out = X @ np.asarray(V, dtype=float) @ X.T + Y
    return 0.5 * (out + out.T)

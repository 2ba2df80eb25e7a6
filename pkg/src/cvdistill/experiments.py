"""End-to-end distillation pipeline, squeezing sweeps and scaling studies."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import gaussian as g
from .conditioning import photon_subtract_many, photon_subtract_one
from .entanglement import Bipartition, log_negativity
from .errors import CapacityError, CVDistillError, InvalidArgument
from .fock import gaussian_to_fock, mixture_to_fock, truncation_deficit

log = logging.getLogger(__name__)

UNBIASED = "unbiased"
GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class PipelineConfig:
    """One run of local squeezing followed by a single photon subtraction.

    ``s`` holds one squeezing value per mode; a scalar is broadcast.
    ``cut`` defaults to ``{detected_mode} | rest``.
    """

    N: int
    r2: float
    s: tuple
    T: float = 0.9
    r1: float | str = UNBIASED
    detected_mode: int = 0
    D: int = 7
    cut: Bipartition | None = None
    eta: float = 1.0

    def __post_init__(self):
        s = np.atleast_1d(np.asarray(self.s, dtype=float))
        if s.size == 1:
            s = np.repeat(s, self.N)
        if s.size != self.N:
            raise InvalidArgument(f"got {s.size} squeezing values for {self.N} modes")
        object.__setattr__(self, "s", tuple(float(x) for x in s))
        if isinstance(self.r1, str) and self.r1 != UNBIASED:
            raise InvalidArgument(f"r1 must be a number or {UNBIASED!r}, got {self.r1!r}")
        if not 0 <= self.detected_mode < self.N:
            raise InvalidArgument(f"detected mode {self.detected_mode} out of range")
        if self.cut is None:
            object.__setattr__(self, "cut", Bipartition.single(self.detected_mode, self.N))
        self.cut.validate(self.N)

    @property
    def r1_value(self) -> float:
        return g.unbiased_r1(self.r2, self.N) if self.r1 == UNBIASED else float(self.r1)

    def params(self) -> g.StateFamilyParams:
        return g.StateFamilyParams(self.N, self.r1_value, self.r2)

    def with_s(self, s: float) -> "PipelineConfig":
        return replace(self, s=(float(s),) * self.N)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["s"] = list(self.s)
        d["r1_value"] = self.r1_value
        d["cut"] = {"side_a": sorted(self.cut.side_a), "side_b": sorted(self.cut.side_b)}
        return d


@dataclass(frozen=True)
class PipelineResult:
    e_before: float
    e_after: float
    p_succ: float
    deficit: float
    config: PipelineConfig

    def to_dict(self) -> dict:
        return {
            "e_before": self.e_before,
            "e_after": self.e_after,
            "p_succ": self.p_succ,
            "deficit": self.deficit,
            "config": self.config.to_dict(),
        }


@dataclass
class SweepResult:
    s: np.ndarray
    results: list
    errors: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) if r is not None else np.nan for r in self.results])


@dataclass
class OptResult:
    s_opt: float
    e_opt: float
    p_at_opt: float
    result: PipelineResult
    sweep: SweepResult
    boundary: bool = False
    evaluations: int = 0


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    V = g.symmetric_state(cfg.params())
    VS = g.apply_symplectic(V, g.local_squeezers(cfg.s))
    outcome = photon_subtract_one(VS, cfg.detected_mode, cfg.T, eta=cfg.eta)
    e_before = log_negativity(gaussian_to_fock(V, cfg.D), cfg.cut)
    if outcome.is_empty:
        return PipelineResult(e_before, math.nan, 0.0, math.nan, cfg)
    rho = mixture_to_fock(outcome.state, cfg.D)
    return PipelineResult(
        e_before=e_before,
        e_after=log_negativity(rho, cfg.cut),
        p_succ=outcome.p_succ,
        deficit=truncation_deficit(rho),
        config=cfg,
    )


def _safe_run(cfg):
    try:
        return run_pipeline(cfg), None
    except CVDistillError as exc:
        return None, f"{type(exc).__name__}: {exc}"


def _map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def sweep_s(cfg: PipelineConfig, s_min: float, s_max: float, steps: int, jobs: int = 1) -> SweepResult:
    """Evaluate the equal-squeezing pipeline on ``linspace(s_min, s_max, steps)``.

    Points that raise are recorded in ``errors`` (keyed by grid index) and
    left as ``None`` in ``results``.
    """
    if not s_min < s_max:
        raise InvalidArgument(f"need s_min < s_max, got {s_min}, {s_max}")
    if steps < 2:
        raise InvalidArgument(f"need at least 2 steps, got {steps}")
    grid = np.linspace(s_min, s_max, steps)
    outs = _map(_safe_run, [cfg.with_s(s) for s in grid], jobs)
    errors = {i: err for i, (_, err) in enumerate(outs) if err is not None}
    for i, err in errors.items():
        log.warning("sweep point s=%g failed: %s", grid[i], err)
    return SweepResult(grid, [res for res, _ in outs], errors)


def golden_section_max(f, lo: float, hi: float, xtol: float = 1e-4):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x), n_evals)``."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    n = 2
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
        n += 1
    return (c, fc, n) if fc >= fd else (d, fd, n)


def default_bracket(r2: float) -> tuple:
    return (0.0, 4.0 * r2)


def optimize_s(cfg: PipelineConfig, bracket=None, coarse_steps: int = 9, xtol: float = 1e-4, jobs: int = 1) -> OptResult:
    """Locate the equal squeezing that maximizes the distilled log-negativity.

    A coarse grid over ``bracket`` picks the best cell, then golden-section
    search refines it to ``xtol``.  ``boundary`` is set when the coarse
    maximum sits on an end of the bracket.
    """
    lo, hi = bracket if bracket is not None else default_bracket(cfg.r2)
    sweep = sweep_s(cfg, lo, hi, coarse_steps, jobs=jobs)
    e = sweep.column("e_after")
    if np.all(np.isnan(e)):
        if sweep.errors:
            run_pipeline(cfg.with_s(lo))  # re-raise the underlying error
        raise CVDistillError("every coarse grid point failed")
    i = int(np.nanargmax(e))
    boundary = i in (0, len(e) - 1)
    a = sweep.s[max(i - 1, 0)]
    b = sweep.s[min(i + 1, len(e) - 1)]
    cache = {}

    def objective(s):
        res = run_pipeline(cfg.with_s(s))
        cache[s] = res
        return res.e_after if not math.isnan(res.e_after) else -math.inf

    s_opt, e_opt, n = golden_section_max(objective, a, b, xtol)
    best = cache[s_opt]
    if e[i] > e_opt:
        # the coarse point beat the refined interior (flat or boundary maximum)
        best, s_opt, e_opt = sweep.results[i], float(sweep.s[i]), float(e[i])
    return OptResult(
        s_opt=float(s_opt),
        e_opt=float(e_opt),
        p_at_opt=best.p_succ,
        result=best,
        sweep=sweep,
        boundary=boundary,
        evaluations=coarse_steps + n,
    )


def n_scaling_study(r2: float, T: float, N_list, D: int = 6, bracket=None, jobs: int = 1) -> list:
    """Optimize ``s`` for each ``N`` and tabulate the heralding probability.

    Rows that hit the Fock capacity cap carry an ``error`` entry instead
    of numbers.
    """
    rows = []
    for N in N_list:
        cfg = PipelineConfig(N=N, r2=r2, s=0.0, T=T, D=D)
        try:
            opt = optimize_s(cfg, bracket, jobs=jobs)
        except CapacityError as exc:
            log.warning("N=%d skipped: %s", N, exc)
            rows.append({"N": N, "error": str(exc)})
            continue
        rows.append({"N": N, "s_opt": opt.s_opt, "e_opt": opt.e_opt, "p_succ": opt.p_at_opt})
    return rows


def baseline_study(r2: float, T: float, eta: float, N_list) -> list:
    """Joint heralding probability when every mode is photon-subtracted.

    Each row also carries ``p_one``, the single-subtraction probability on
    the same unsqueezed state with the same detector efficiency.
    """
    rows = []
    for N in N_list:
        V = g.symmetric_state(g.StateFamilyParams.unbiased(N, r2))
        p_all = photon_subtract_many(V, range(N), T, eta).p_succ
        p_one = photon_subtract_one(V, 0, T, eta=eta).p_succ
        rows.append(
            {
                "N": N,
                "log10_p": math.log10(p_all) if p_all > 0 else -math.inf,
                "p": p_all,
                "p_one": p_one,
            }
        )
    return rows

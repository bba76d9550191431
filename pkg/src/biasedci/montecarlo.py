"""Simulation checks of the analytic coverage results.

`simulate_joint_normal` samples the estimator pair directly from its
joint-normal model and counts coverage, which gives an independent check on
`biasedci.coverage`.  `run_study` exercises the full pipeline instead:
simulate data, estimate ``s1, s2, rho`` by a pairs bootstrap, build the
intervals and score them against the true slope.

The demo estimator pair is OLS (unbiased) against ridge (biased toward
zero, lower variance) for the slope of ``Y = 1 + 2 X + U``.  The ridge
penalty is fixed at ``4 / sqrt(n)`` on the sum-of-squares scale, i.e. the
slope minimises ``sum((y - a - b x)^2) + lam b^2`` with the intercept left
unpenalised.

Every replication draws from its own Philox sub-stream keyed by its
indices, so results do not depend on the number of workers.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .coverage import EstimatorModel
from .errors import BootstrapFailure, DomainError
from .intervals import Kind, build
from .normal import sample_bivariate, substream

__all__ = [
    "SimulationConfig",
    "KindStats",
    "SimulationResult",
    "BootstrapEstimates",
    "simulate_joint_normal",
    "pairs_bootstrap",
    "demo_dgp",
    "ols_slope",
    "ridge_slope",
    "ridge_penalty",
    "run_study",
    "STUDY_KINDS",
    "study_columns",
]

log = logging.getLogger(__name__)

TRUE_INTERCEPT = 1.0
TRUE_SLOPE = 2.0
STUDY_KINDS = (Kind.CI1, Kind.CI2, Kind.CI5, Kind.CI6S, Kind.CI6)
_CHUNK = 1 << 18
_MAX_RETRIES = 10


@dataclass(frozen=True)
class SimulationConfig:
    model: EstimatorModel
    level: float = 0.95
    n_reps: int = 100_000
    seed: int = 0
    kinds: tuple = (Kind.CI1, Kind.CI2, Kind.CI5)

    def __post_init__(self):
        if self.n_reps < 1:
            raise DomainError(f"n_reps must be at least 1, got {self.n_reps}")
        if not 0.0 < self.level < 1.0:
            raise DomainError(f"level must lie in (0, 1), got {self.level}")
        object.__setattr__(self, "kinds", tuple(
            k if isinstance(k, Kind) else Kind.parse(k) for k in self.kinds))


class KindStats(NamedTuple):
    coverage: float
    mc_stderr: float
    median_length: float


@dataclass
class SimulationResult:
    stats: dict
    n_reps: int
    seed: int
    level: float
    model: Optional[EstimatorModel] = None

    RESULT_COLUMNS = ("kind", "coverage", "mc_stderr", "median_length", "n_reps", "seed", "level")

    def to_rows(self) -> list[dict]:
        return [{"kind": k.value, **s._asdict(), "n_reps": self.n_reps, "seed": self.seed,
                 "level": self.level} for k, s in self.stats.items()]

    @classmethod
    def from_rows(cls, rows: Sequence[dict]) -> "SimulationResult":
        if not rows:
            raise DomainError("no rows to rebuild a SimulationResult from")
        stats = {Kind.parse(r["kind"]): KindStats(float(r["coverage"]), float(r["mc_stderr"]),
                                                  float(r["median_length"])) for r in rows}
        r0 = rows[0]
        return cls(stats, int(r0["n_reps"]), int(r0["seed"]), float(r0["level"]))


def _stats(covered: int, n: int, median_length: float) -> KindStats:
    cov = covered / n
    return KindStats(cov, math.sqrt(cov * (1.0 - cov) / n), median_length)


def simulate_joint_normal(cfg: SimulationConfig) -> SimulationResult:
    """Monte Carlo coverage of each requested interval under the true model.

    Intervals are built from the model's true ``s1, s2, rho``, so their
    half-widths are fixed and only the centres vary.  Draws come in chunks
    of 2^18, chunk ``i`` using sub-stream ``(seed, i)``.  A model without a
    correlation is sampled with ``rho = 0``, which leaves the marginals
    (all that CI1-CI5 depend on) unchanged.
    """
    m = cfg.model
    rho = 0.0 if m.rho is None else m.rho
    # each kind is (weight on theta2_hat, half-width)
    shape = {}
    for kind in cfg.kinds:
        iv = build(kind, 0.0, 1.0, m.s1, m.s2, m.rho, cfg.level)
        # the centre of build(kind, 0, 1, ...) is exactly the weight on theta2_hat
        shape[kind] = (iv.center, iv.half_width)
    covered = dict.fromkeys(cfg.kinds, 0)
    done = 0
    chunk = 0
    while done < cfg.n_reps:
        size = min(_CHUNK, cfg.n_reps - done)
        draws = sample_bivariate(m.theta, m.theta + m.b2, m.s1, m.s2, rho, cfg.seed, size,
                                 key=(chunk,))
        for kind, (w, hw) in shape.items():
            centre = (1.0 - w) * draws[:, 0] + w * draws[:, 1]
            covered[kind] += int(np.count_nonzero(np.abs(centre - m.theta) <= hw))
        done += size
        chunk += 1
    stats = {k: _stats(covered[k], cfg.n_reps, 2.0 * shape[k][1]) for k in cfg.kinds}
    return SimulationResult(stats, cfg.n_reps, cfg.seed, cfg.level, m)


@dataclass(frozen=True)
class BootstrapEstimates:
    """Bootstrap standard errors and correlation of the two estimators.

    ``degenerate`` is set when one sequence has zero variance; ``rho_hat``
    is then reported as 0.
    """

    s1_hat: float
    s2_hat: float
    rho_hat: float
    n_boot: int
    degenerate: bool = False
    n_failures: int = 0


def _moments(e1: np.ndarray, e2: np.ndarray, n_failures: int) -> BootstrapEstimates:
    s1 = float(np.std(e1, ddof=1))
    s2 = float(np.std(e2, ddof=1))
    if s1 == 0.0 or s2 == 0.0:
        return BootstrapEstimates(s1, s2, 0.0, len(e1), True, n_failures)
    rho = float(np.corrcoef(e1, e2)[0, 1])
    return BootstrapEstimates(s1, s2, min(max(rho, -1.0), 1.0), len(e1), False, n_failures)


def pairs_bootstrap(data, estimator1: Callable, estimator2: Callable, n_boot: int,
                    seed: int, *, key: tuple = (), vectorized: bool = False) -> BootstrapEstimates:
    """Nonparametric pairs bootstrap of two scalar estimators.

    Whole rows of ``data`` are resampled with replacement.  ``s1_hat`` and
    ``s2_hat`` are the sample standard deviations of the replicate
    estimates, ``rho_hat`` their correlation clamped to ``[-1, 1]``.

    Parameters
    ----------
    data : array_like, shape (n, k)
        Observation rows.
    estimator1, estimator2 : callable
        Map a resampled ``(n, k)`` array to a scalar.  With ``vectorized``
        they instead receive a ``(n_boot, n, k)`` stack and return
        ``(n_boot,)`` arrays.
    n_boot : int
        Number of resamples, at least 2.
    seed, key
        Select the Philox sub-stream.

    A resample on which either estimator raises or returns a non-finite
    value is redrawn; after 10 failed redraws `BootstrapFailure` is raised.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    n = data.shape[0]
    if n == 0:
        raise DomainError("bootstrap needs at least one observation")
    if n_boot < 2:
        raise DomainError(f"n_boot must be at least 2, got {n_boot}")
    rng = substream(seed, *key)
    failures = 0
    if vectorized:
        idx = rng.integers(0, n, size=(n_boot, n))
        e1 = np.asarray(estimator1(data[idx]), dtype=float)
        e2 = np.asarray(estimator2(data[idx]), dtype=float)
        for _ in range(_MAX_RETRIES + 1):
            bad = ~(np.isfinite(e1) & np.isfinite(e2))
            if not bad.any():
                return _moments(e1, e2, failures)
            failures += int(bad.sum())
            redo = rng.integers(0, n, size=(int(bad.sum()), n))
            e1[bad] = estimator1(data[redo])
            e2[bad] = estimator2(data[redo])
        raise BootstrapFailure(f"estimators failed on resamples after {_MAX_RETRIES} redraws")

    e1 = np.empty(n_boot)
    e2 = np.empty(n_boot)
    for b in range(n_boot):
        for attempt in range(_MAX_RETRIES + 1):
            sample = data[rng.integers(0, n, size=n)]
            try:
                v1 = float(estimator1(sample))
                v2 = float(estimator2(sample))
            except Exception as exc:  # any estimator error just costs a redraw
                log.debug("bootstrap replicate %d failed: %s", b, exc)
                v1 = v2 = math.nan
            if math.isfinite(v1) and math.isfinite(v2):
                e1[b], e2[b] = v1, v2
                break
            failures += 1
        else:
            raise BootstrapFailure(
                f"estimators failed on replicate {b} after {_MAX_RETRIES} redraws")
    return _moments(e1, e2, failures)


def demo_dgp(n: int, seed: int, *, key: tuple = ()) -> tuple[np.ndarray, float]:
    """Draw ``(X, Y)`` rows from ``Y = 1 + 2 X + U`` with independent N(0,1) ``X, U``.

    Returns the ``(n, 2)`` data array and the true slope.
    """
    if n < 10:
        raise DomainError(f"demo sample size must be at least 10, got {n}")
    rng = substream(seed, *key)
    x = rng.standard_normal(n)
    u = rng.standard_normal(n)
    return np.column_stack([x, TRUE_INTERCEPT + TRUE_SLOPE * x + u]), TRUE_SLOPE


def ridge_penalty(n: int) -> float:
    return 4.0 / math.sqrt(n)


def _centred_moments(data):
    data = np.asarray(data, dtype=float)
    x = data[..., 0]
    y = data[..., 1]
    xc = x - x.mean(axis=-1, keepdims=True)
    yc = y - y.mean(axis=-1, keepdims=True)
    return (xc * yc).sum(axis=-1), (xc * xc).sum(axis=-1)


def ols_slope(data):
    """OLS slope of column 1 on column 0; broadcasts over leading axes."""
    sxy, sxx = _centred_moments(data)
    with np.errstate(divide="ignore", invalid="ignore"):
        return sxy / sxx


def ridge_slope(data, lam: Optional[float] = None):
    """Ridge slope with an unpenalised intercept, ``Sxy / (Sxx + lam)``.

    ``lam`` defaults to ``4 / sqrt(n)``.
    """
    n = np.shape(data)[-2]
    lam = ridge_penalty(n) if lam is None else lam
    sxy, sxx = _centred_moments(data)
    return sxy / (sxx + lam)


def study_columns(kinds: Sequence[Kind] = STUDY_KINDS) -> list[str]:
    cols = ["n", "level", "tau_or_tag"]
    cols += [f"{k.value}_CP" for k in kinds]
    cols += [f"{k.value}_median_length" for k in kinds]
    cols += [f"{k.value}_CP_se" for k in kinds]
    cols += ["reps", "n_boot", "clip_rate", "rho_degenerate_rate"]
    return cols


def _study_block(args) -> tuple[np.ndarray, np.ndarray, int, int]:
    """Replications ``reps`` of one study cell; returns coverage, lengths and flag counts."""
    cell, n, level, reps, n_boot, master_seed, kinds = args
    covered = np.zeros((len(reps), len(kinds)), dtype=bool)
    lengths = np.zeros((len(reps), len(kinds)))
    clipped = 0
    degenerate = 0
    for i, r in enumerate(reps):
        data, theta = demo_dgp(n, master_seed, key=(cell, r, 0))
        th1 = float(ols_slope(data))
        th2 = float(ridge_slope(data))
        boot = pairs_bootstrap(data, ols_slope, ridge_slope, n_boot, master_seed,
                               key=(cell, r, 1), vectorized=True)
        clipped += boot.s2_hat > boot.s1_hat
        degenerate += boot.degenerate
        for j, kind in enumerate(kinds):
            iv = build(kind, th1, th2, boot.s1_hat, boot.s2_hat, boot.rho_hat, level, clip=True)
            covered[i, j] = iv.contains(theta)
            lengths[i, j] = iv.length
    return covered, lengths, clipped, degenerate


def run_study(grid: Iterable[tuple[int, float]], sim_reps: int = 500, n_boot: int = 399,
              master_seed: int = 0, *, kinds: Sequence = STUDY_KINDS,
              workers: int = 1, block: int = 25) -> list[dict]:
    """Coverage and median length of each interval kind on the OLS/ridge demo.

    For every ``(n, level)`` cell, ``sim_reps`` datasets are drawn; each is
    bootstrapped ``n_boot`` times for ``s1, s2, rho`` and every interval in
    ``kinds`` is built with clipping enabled (``s2_hat > s1_hat`` is replaced
    by ``s1_hat`` and counted in ``clip_rate``).  Returns one dict per cell
    with the columns of `study_columns`.

    Replication ``r`` of cell ``c`` uses sub-streams ``(c, r, 0)`` for the
    data and ``(c, r, 1)`` for the bootstrap, so ``workers`` only changes
    speed, never the output.
    """
    if sim_reps < 1 or n_boot < 2:
        raise DomainError("need sim_reps >= 1 and n_boot >= 2")
    kinds = tuple(k if isinstance(k, Kind) else Kind.parse(k) for k in kinds)
    cells = [(int(n), float(level)) for n, level in grid]
    tasks = []
    for c, (n, level) in enumerate(cells):
        for start in range(0, sim_reps, block):
            reps = tuple(range(start, min(start + block, sim_reps)))
            tasks.append((c, n, level, reps, n_boot, master_seed, kinds))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_study_block, tasks))
    else:
        results = [_study_block(t) for t in tasks]

    rows = []
    for c, (n, level) in enumerate(cells):
        parts = [res for task, res in zip(tasks, results) if task[0] == c]
        covered = np.concatenate([p[0] for p in parts])
        lengths = np.concatenate([p[1] for p in parts])
        clipped = sum(p[2] for p in parts)
        degenerate = sum(p[3] for p in parts)
        row = {"n": n, "level": level, "tau_or_tag": "demo"}
        for j, kind in enumerate(kinds):
            st = _stats(int(covered[:, j].sum()), sim_reps, float(np.median(lengths[:, j])))
            row[f"{kind.value}_CP"] = st.coverage
            row[f"{kind.value}_median_length"] = st.median_length
            row[f"{kind.value}_CP_se"] = st.mc_stderr
        row.update(reps=sim_reps, n_boot=n_boot, clip_rate=clipped / sim_reps,
                   rho_degenerate_rate=degenerate / sim_reps)
        rows.append({col: row[col] for col in study_columns(kinds)})
    return rows

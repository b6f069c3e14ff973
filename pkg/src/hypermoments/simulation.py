"""Monte Carlo sampling of diluted weighted hypergraph adjacency matrices."""

from __future__ import annotations

import dataclasses
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .params import ParameterError, as_fraction
from .weights import WeightDistribution

__all__ = [
    "SampledHypergraph",
    "SimConfig",
    "SimRun",
    "SimulationError",
    "DecayStudy",
    "FULL_ENUMERATION_LIMIT",
    "trial_rng",
    "sample_hypergraph",
    "assemble_adjacency",
    "empirical_moments",
    "eigen_histogram",
    "bin_eigenvalues",
    "write_histogram",
    "run_trials",
    "correlator_decay_study",
]

# above this many q-subsets the edge count is drawn first, then the subsets
FULL_ENUMERATION_LIMIT = 10**6


@dataclass
class SampledHypergraph:
    N: int
    q: int
    edges: np.ndarray      # (m, q) sorted vertex indices, 0-based
    weights: np.ndarray    # (m,)

    @property
    def n_edges(self) -> int:
        return len(self.edges)


def edge_probability(N: int, q: int, p) -> Fraction:
    prob = as_fraction(p) / Fraction(N) ** (q - 1)
    if not 0 < prob <= 1:
        raise ParameterError(f"edge probability p/N^(q-1) = {prob} is not in (0, 1]")
    return prob


@lru_cache(maxsize=8)
def _all_subsets(N: int, q: int) -> np.ndarray:
    flat = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(N), q)), dtype=np.int64)
    out = flat.reshape(-1, q)
    out.setflags(write=False)
    return out


def _distinct_subsets(N: int, q: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` distinct q-subsets, uniformly among all such collections."""
    chosen: dict[tuple[int, ...], None] = {}
    while len(chosen) < count:
        batch = max(16, 2 * (count - len(chosen)))
        draws = np.sort(rng.integers(0, N, size=(batch, q)), axis=1)
        ok = np.all(np.diff(draws, axis=1) > 0, axis=1)
        for row in draws[ok]:
            chosen.setdefault(tuple(int(x) for x in row))
            if len(chosen) == count:
                break
    return np.array(list(chosen), dtype=np.int64).reshape(-1, q)


def sample_hypergraph(
    N: int,
    q: int,
    p,
    rng: np.random.Generator,
    dist: WeightDistribution | None = None,
    method: str = "auto",
) -> SampledHypergraph:
    """Draw each q-subset of ``range(N)`` independently with probability ``p / N**(q-1)``.

    ``method="bernoulli"`` flips one coin per subset; ``"binomial"`` draws
    the edge count and then that many distinct uniform subsets, which is the
    same law.  ``"auto"`` picks by the number of subsets.  Weights come from
    ``dist`` (all ones when omitted).
    """
    if N < q:
        raise ParameterError(f"N={N} is smaller than q={q}")
    prob = float(edge_probability(N, q, p))
    total = math.comb(N, q)
    if method == "auto":
        method = "bernoulli" if total <= FULL_ENUMERATION_LIMIT else "binomial"
    if method == "bernoulli":
        subsets = _all_subsets(N, q)
        edges = subsets[rng.random(total) < prob]
    elif method == "binomial":
        edges = _distinct_subsets(N, q, int(rng.binomial(total, prob)), rng)
    else:
        raise ValueError(f"unknown sampling method {method!r}")
    weights = np.ones(len(edges)) if dist is None else np.asarray(dist.sample(rng, len(edges)), dtype=float)
    return SampledHypergraph(N, q, edges, weights)


def assemble_adjacency(h: SampledHypergraph) -> np.ndarray:
    """Dense symmetric matrix with ``A[i, j] = sum of weights of edges holding both i != j``."""
    A = np.zeros((h.N, h.N))
    if h.n_edges:
        ii, jj = np.triu_indices(h.q, k=1)
        rows = h.edges[:, ii].ravel()
        cols = h.edges[:, jj].ravel()
        np.add.at(A, (rows, cols), np.repeat(h.weights, len(ii)))
        A = A + A.T
    return A


def empirical_moments(A: np.ndarray, k_max: int, method: str = "power") -> np.ndarray:
    """``Tr(A^k) / N`` for ``k = 0..k_max``.

    ``method="power"`` multiplies up to ``A^ceil(k_max/2)`` and pairs powers
    through Frobenius products; ``"eigen"`` uses a symmetric eigensolver.
    """
    N = A.shape[0]
    out = np.empty(k_max + 1)
    out[0] = 1.0
    if method == "eigen":
        lam = np.linalg.eigvalsh(A)
        for k in range(1, k_max + 1):
            out[k] = np.sum(lam**k) / N
        return out
    if method != "power":
        raise ValueError(f"unknown method {method!r}")
    powers = [np.eye(N), A]
    for _ in range(2, (k_max + 1) // 2 + 1):
        powers.append(powers[-1] @ A)
    for k in range(1, k_max + 1):
        h = k // 2
        # Tr(A^k) = <A^h, A^(k-h)> for symmetric A
        out[k] = np.trace(A) / N if k == 1 else np.vdot(powers[h], powers[k - h]) / N
    return out


def eigen_histogram(A: np.ndarray, bins=50, range=None) -> tuple[np.ndarray, np.ndarray]:
    """Bin centres and eigenvalue mass per bin (masses sum to one).

    ``bins`` and ``range`` are passed to :func:`numpy.histogram`.
    """
    return bin_eigenvalues(np.linalg.eigvalsh(A), bins, range)


def bin_eigenvalues(lam: np.ndarray, bins=50, range=None) -> tuple[np.ndarray, np.ndarray]:
    lam = np.ravel(lam)
    counts, edges = np.histogram(lam, bins=bins, range=range)
    return 0.5 * (edges[:-1] + edges[1:]), counts / len(lam)


def write_histogram(path, centers: np.ndarray, mass: np.ndarray) -> None:
    np.savetxt(path, np.column_stack([centers, mass]), fmt="%.17g")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Generator for one trial, keyed by ``(seed, trial)`` only."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


@dataclass
class SimConfig:
    N: int
    q: int
    p: Fraction
    dist: WeightDistribution
    trials: int = 200
    k_max: int = 4
    seed: int = 0
    workers: int = 1
    method: str = "auto"
    eigen: bool = False

    def __post_init__(self):
        self.p = as_fraction(self.p)
        if self.q < 2:
            raise ParameterError(f"q must be >= 2, got {self.q}")
        if self.N < self.q:
            raise ParameterError(f"N={self.N} is smaller than q={self.q}")
        edge_probability(self.N, self.q, self.p)
        if self.trials < 1:
            raise ParameterError("need at least one trial")
        if self.k_max < 1:
            raise ParameterError("k_max must be >= 1")


@dataclass
class SimRun:
    """Per-trial moments and their aggregates.

    ``correlators[k, m]`` is the sample covariance of ``M_k`` and ``M_m``
    across trials (``None`` with a single trial).
    """

    config: SimConfig
    moments: np.ndarray                    # (trials, k_max + 1)
    edge_counts: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray | None = field(default=None, repr=False)   # (trials, N)
    mean: np.ndarray = field(init=False)
    stderr: np.ndarray = field(init=False)
    correlators: np.ndarray | None = field(init=False)

    def __post_init__(self):
        n = len(self.moments)
        self.mean = self.moments.mean(axis=0)
        if n >= 2:
            self.stderr = self.moments.std(axis=0, ddof=1) / math.sqrt(n)
            self.correlators = np.cov(self.moments, rowvar=False, ddof=1)
        else:
            self.stderr = np.full(self.moments.shape[1], np.nan)
            self.correlators = None


class SimulationError(RuntimeError):
    """A trial failed; the message names the seed and trial index."""


MOMENT_PATH_RTOL = 1e-9


def _one_trial(cfg: SimConfig, trial: int):
    rng = trial_rng(cfg.seed, trial)
    h = sample_hypergraph(cfg.N, cfg.q, cfg.p, rng, cfg.dist, cfg.method)
    A = assemble_adjacency(h)
    M = empirical_moments(A, cfg.k_max)
    lam = None
    if cfg.eigen:
        try:
            lam = np.linalg.eigvalsh(A)
        except np.linalg.LinAlgError as exc:
            raise SimulationError(f"eigensolver failed in trial {trial} (seed {cfg.seed}): {exc}") from exc
        for k in range(1, cfg.k_max + 1):
            # odd traces can cancel to ~0, so compare on the scale of sum |lambda|^k
            scale = np.sum(np.abs(lam) ** k) / cfg.N
            if abs(np.sum(lam**k) / cfg.N - M[k]) > MOMENT_PATH_RTOL * max(scale, 1e-300):
                raise SimulationError(f"trace-power and eigenvalue moments disagree at k={k} "
                                      f"in trial {trial} (seed {cfg.seed})")
    return M, h.n_edges, lam


def run_trials(config: SimConfig) -> SimRun:
    """Run ``config.trials`` independent samples; results depend only on seed and trial index."""
    idx = range(config.trials)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda t: _one_trial(config, t), idx))
    else:
        results = [_one_trial(config, t) for t in idx]
    moments = np.array([r[0] for r in results]).reshape(config.trials, config.k_max + 1)
    edges = np.array([r[1] for r in results], dtype=np.int64)
    eig = np.array([r[2] for r in results]) if config.eigen else None
    return SimRun(config, moments, edges, eig)


@dataclass
class DecayStudy:
    k: int
    m: int
    N_grid: list[int]
    correlators: list[float]
    correlator_se: list[float]
    slope: float | None
    slope_ci: tuple[float, float] | None
    degenerate: bool
    runs: list[SimRun] = field(repr=False, default_factory=list)


def _fit_slope(N: np.ndarray, C: np.ndarray) -> float:
    return float(np.polyfit(np.log(N), np.log(C), 1)[0])


def _cov(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.sum((x - x.mean()) * (y - y.mean())) / (len(x) - 1))


def correlator_decay_study(
    config: SimConfig,
    N_grid: Sequence[int],
    k: int = 2,
    m: int = 2,
    n_boot: int = 1000,
    runs: Sequence[SimRun] | None = None,
) -> DecayStudy:
    """Estimate ``C_{k,m}(N)`` on a grid of ``N`` and fit ``log C`` against ``log N``.

    The confidence interval is a percentile bootstrap over trials.  The
    study is flagged degenerate, and no slope is reported, when some
    estimate is not clearly positive (below two bootstrap standard errors).
    """
    if len(N_grid) < 4:
        raise ParameterError("the N grid needs at least four points")
    if config.trials < 2:
        raise ParameterError("correlators need at least two trials")
    if max(k, m) > config.k_max:
        raise ParameterError(f"k_max={config.k_max} is below the requested correlator order")
    if runs is None:
        runs = []
        for N in N_grid:
            cfg = dataclasses.replace(config, N=N, eigen=False)
            runs.append(run_trials(cfg))
    boot_rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(2**32 - 1,)))
    C = np.array([_cov(r.moments[:, k], r.moments[:, m]) for r in runs])
    boot = np.empty((n_boot, len(runs)))
    for j, r in enumerate(runs):
        n = len(r.moments)
        for b in range(n_boot):
            sel = boot_rng.integers(0, n, size=n)
            boot[b, j] = _cov(r.moments[sel, k], r.moments[sel, m])
    se = boot.std(axis=0, ddof=1)
    degenerate = bool(np.any(C <= 0) or np.any(C < 2 * se))
    slope = ci = None
    if not degenerate:
        Ns = np.asarray(N_grid, dtype=float)
        slope = _fit_slope(Ns, C)
        good = np.all(boot > 0, axis=1)
        slopes = np.array([_fit_slope(Ns, row) for row in boot[good]])
        ci = (float(np.percentile(slopes, 2.5)), float(np.percentile(slopes, 97.5)))
    return DecayStudy(k, m, list(N_grid), C.tolist(), se.tolist(), slope, ci, degenerate, list(runs))

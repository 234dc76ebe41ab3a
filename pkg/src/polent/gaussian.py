"""Gaussian dark-plane fluctuation statistics and their propagation.

Means of dark-plane parameters vanish identically, so a state is fully
described by its covariance matrix over a :class:`FluctuationBasis`.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .basis import FluctuationBasis, LinearMap
from .errors import (DegenerateNormalizationError, InvalidArgumentError,
                     NumericalConsistencyError)

SYMMETRY_ATOL = 1e-12
PSD_ATOL = 1e-9
MIN_MC_SAMPLES = 10_000


@dataclass(frozen=True)
class CovarianceModel:
    basis: FluctuationBasis
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        n = len(self.basis)
        if m.shape != (n, n):
            raise InvalidArgumentError(f"covariance shape {m.shape} does not match basis size {n}")
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        if np.max(np.abs(m - m.T), initial=0.0) > SYMMETRY_ATOL * scale:
            raise NumericalConsistencyError("covariance is not symmetric")
        m = 0.5 * (m + m.T)
        if n and np.linalg.eigvalsh(m)[0] < -PSD_ATOL * scale:
            raise NumericalConsistencyError(
                f"covariance is not positive semidefinite (min eigenvalue "
                f"{np.linalg.eigvalsh(m)[0]:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def mean(self) -> np.ndarray:
        return np.zeros(len(self.basis))

    @classmethod
    def shot_noise(cls, basis: FluctuationBasis) -> "CovarianceModel":
        return cls(basis, np.eye(len(basis)))

    def variance(self, beam: str, angle: float) -> float:
        w = self.basis.direction_weights(beam, angle)
        return float(w @ self.matrix @ w)

    def covariance(self, u: tuple[str, float], v: tuple[str, float]) -> float:
        wu = self.basis.direction_weights(*u)
        wv = self.basis.direction_weights(*v)
        return float(wu @ self.matrix @ wv)

    def beam_block(self, beam: str) -> np.ndarray:
        idx = self.basis.beam_indices(beam)
        return self.matrix[np.ix_(idx, idx)]


def propagate(lmap: LinearMap, cov: CovarianceModel) -> CovarianceModel:
    """Push a covariance through a linear map: M Sigma M^T."""
    if not lmap.in_basis.matches(cov.basis):
        raise InvalidArgumentError("map input basis does not match covariance basis")
    m = lmap.matrix
    return CovarianceModel(lmap.out_basis, m @ cov.matrix @ m.T)


def combo_variance(cov: CovarianceModel, weights) -> float:
    """Variance of the linear combination ``weights . x`` (not normalised)."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(cov.basis),):
        raise InvalidArgumentError(f"weight vector length {w.size} != basis size {len(cov.basis)}")
    return float(max(w @ cov.matrix @ w, 0.0))


def shot_reference(weights) -> float:
    """Shot-noise variance of a gained combination: each unit-variance term adds gain^2."""
    w = np.asarray(weights, dtype=float)
    ref = float(w @ w)
    if ref == 0.0:
        raise DegenerateNormalizationError("all-zero weights have no shot-noise reference")
    return ref


def normalized_combo_variance(cov: CovarianceModel, weights) -> float:
    w = np.asarray(weights, dtype=float)
    ref = shot_reference(w)
    return combo_variance(cov, w) / ref


@dataclass(frozen=True)
class MCConfig:
    samples: int = 1_000_000
    seed: int = 0
    shards: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.samples < MIN_MC_SAMPLES:
            raise InvalidArgumentError(f"need at least {MIN_MC_SAMPLES} Monte Carlo samples")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidArgumentError("seed must be a 64-bit unsigned integer")
        if self.shards < 1 or self.workers < 1:
            raise InvalidArgumentError("shards and workers must be >= 1")


@dataclass(frozen=True)
class MCResult:
    analytic: float
    empirical: float
    z_score: float
    samples: int
    seed: int

    @property
    def relative_error(self) -> float:
        return abs(self.empirical - self.analytic) / self.analytic


def sampling_factor(cov: CovarianceModel) -> np.ndarray:
    """Symmetric square root L with L L^T = Sigma; small negative eigenvalues clamp to 0."""
    vals, vecs = np.linalg.eigh(cov.matrix)
    if vals.size and vals[0] < -PSD_ATOL:
        raise NumericalConsistencyError(f"cannot factor covariance: eigenvalue {vals[0]:.3e}")
    return vecs @ np.diag(np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


def _shard_sizes(total: int, shards: int) -> list[int]:
    base, extra = divmod(total, shards)
    return [base + (i < extra) for i in range(shards)]


def _shard_sum_sq(factor: np.ndarray, row: np.ndarray, n: int, seed: int, shard: int) -> float:
    # Philox is counter based; (seed, shard) keys an independent substream
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, shard])))
    z = rng.standard_normal((n, factor.shape[0]))
    y = z @ (factor.T @ row)
    return float(np.dot(y, y))


def mc_validate(cov: CovarianceModel, lmap: LinearMap | None, weights, mc: MCConfig) -> MCResult:
    """Monte Carlo estimate of a normalised combo variance after ``lmap``.

    Samples x ~ N(0, Sigma) on ``cov.basis``, pushes them through ``lmap``
    (identity when None) and measures the normalised variance of ``weights``
    on the output basis. Deterministic for a fixed seed and shard count.
    """
    if lmap is None:
        lmap = LinearMap.identity(cov.basis)
    if not lmap.in_basis.matches(cov.basis):
        raise InvalidArgumentError("map input basis does not match covariance basis")
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(lmap.out_basis),):
        raise InvalidArgumentError("weights do not match the map output basis")
    ref = shot_reference(w)
    analytic = normalized_combo_variance(propagate(lmap, cov), w)

    factor = sampling_factor(cov)
    row = lmap.matrix.T @ w
    sizes = _shard_sizes(mc.samples, mc.shards)
    jobs = [(factor, row, n, mc.seed, i) for i, n in enumerate(sizes)]
    if mc.workers > 1 and mc.shards > 1:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            partial = list(pool.map(lambda a: _shard_sum_sq(*a), jobs))
    else:
        partial = [_shard_sum_sq(*a) for a in jobs]
    total = 0.0
    for p in partial:  # fixed shard order keeps the sum bit-reproducible
        total += p
    empirical = total / mc.samples / ref

    # zero-mean known: Var(mean of y^2) = 2 sigma^4 / N
    sigma_err = analytic * np.sqrt(2.0 / mc.samples)
    z = (empirical - analytic) / sigma_err if sigma_err > 0 else 0.0
    return MCResult(analytic, empirical, float(z), mc.samples, mc.seed)

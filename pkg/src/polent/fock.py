"""Truncated two-mode Fock-space realisation of the Stokes operators.

Used as an independent check on the SU(2) algebra and on the shot-noise
normalisation of the Gaussian model. Basis order is row-major over
``(n_x, n_y)``: index ``n_x * (n_max + 1) + n_y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np
from scipy.stats import poisson

from .errors import DegenerateNormalizationError, InvalidArgumentError, TruncationError

N_MAX_LIMIT = 32
TAIL_THRESHOLD = 1e-6

_EPSILON = {
    (1, 2, 3): 1, (2, 3, 1): 1, (3, 1, 2): 1,
    (2, 1, 3): -1, (3, 2, 1): -1, (1, 3, 2): -1,
}


@dataclass(frozen=True)
class TruncatedTwoModeSpace:
    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise InvalidArgumentError("n_max must be an integer >= 1")
        if self.n_max > N_MAX_LIMIT:
            raise InvalidArgumentError(f"n_max > {N_MAX_LIMIT} not supported (dense oracle)")

    @property
    def mode_dim(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return self.mode_dim ** 2

    def index(self, nx: int, ny: int) -> int:
        return nx * self.mode_dim + ny

    def fock_state(self, nx: int, ny: int) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.index(nx, ny)] = 1.0
        return psi

    def protected_indices(self) -> np.ndarray:
        """States with n_x + n_y <= n_max - 1, where truncation cannot be felt."""
        n = np.arange(self.mode_dim)
        total = (n[:, None] + n[None, :]).ravel()
        return np.flatnonzero(total <= self.n_max - 1)

    def annihilators(self) -> tuple[np.ndarray, np.ndarray]:
        a = np.diag(np.sqrt(np.arange(1, self.mode_dim)), 1)
        eye = np.eye(self.mode_dim)
        return np.kron(a, eye), np.kron(eye, a)


@dataclass(frozen=True)
class OperatorMatrix:
    label: str
    matrix: np.ndarray = field(repr=False)

    def expectation(self, psi: np.ndarray) -> float:
        return float(np.real(np.vdot(psi, self.matrix @ psi)))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))


def build_stokes_matrices(space: TruncatedTwoModeSpace) -> dict[str, OperatorMatrix]:
    ax, ay = space.annihilators()
    ax, ay = ax.astype(complex), ay.astype(complex)
    axd, ayd = ax.conj().T, ay.conj().T
    nx, ny = axd @ ax, ayd @ ay
    mats = {
        "S0": nx + ny,
        "S1": nx - ny,
        "S2": axd @ ay + ayd @ ax,
        "S3": 1j * (ayd @ ax - axd @ ay),
    }
    return {k: OperatorMatrix(k, v) for k, v in mats.items()}


def dark_plane_operator(stokes: dict[str, OperatorMatrix], theta: float) -> OperatorMatrix:
    m = np.cos(theta) * stokes["S1"].matrix + np.sin(theta) * stokes["S2"].matrix
    return OperatorMatrix(f"S({theta:g})", m)


def commutator_residual(space: TruncatedTwoModeSpace, k: int, l: int, m: int | None = None) -> float:
    """Max-norm of ``[S_k, S_l] - 2i eps_klm S_m`` on the protected subspace.

    ``k = 0`` (or ``l = 0``) checks that S0 commutes with the other operator;
    ``m`` is then ignored.
    """
    stokes = build_stokes_matrices(space)
    cols = space.protected_indices()
    if 0 in (k, l):
        if k not in range(4) or l not in range(4):
            raise InvalidArgumentError("Stokes indices must lie in 0..3")
        sk, sl = stokes[f"S{k}"].matrix, stokes[f"S{l}"].matrix
        return float(np.max(np.abs((sk @ sl - sl @ sk)[:, cols])))
    if (k, l, m) not in _EPSILON:
        raise InvalidArgumentError(f"{(k, l, m)} is not a permutation of (1, 2, 3)")
    sk, sl, sm = (stokes[f"S{i}"].matrix for i in (k, l, m))
    resid = sk @ sl - sl @ sk - 2j * _EPSILON[(k, l, m)] * sm
    return float(np.max(np.abs(resid[:, cols])))


def coherent_mode_amplitudes(n_max: int, amplitude: complex) -> np.ndarray:
    n = np.arange(n_max + 1)
    norms = np.sqrt([float(factorial(int(k))) for k in n])
    return np.exp(-abs(amplitude) ** 2 / 2) * amplitude ** n / norms


def circular_coherent_state(alpha: complex, space: TruncatedTwoModeSpace) -> np.ndarray:
    """Product coherent state with a_x = alpha/sqrt(2), a_y = i alpha/sqrt(2).

    Refuses when the Poisson tail above n_max exceeds the threshold in either mode.
    """
    mean_per_mode = abs(alpha) ** 2 / 2
    tail = float(poisson.sf(space.n_max, mean_per_mode)) if mean_per_mode > 0 else 0.0
    if tail >= TAIL_THRESHOLD:
        raise TruncationError(
            f"coherent tail above n_max={space.n_max} is {tail:.2e} per mode "
            f"(threshold {TAIL_THRESHOLD:g})")
    cx = coherent_mode_amplitudes(space.n_max, alpha / np.sqrt(2))
    cy = coherent_mode_amplitudes(space.n_max, 1j * alpha / np.sqrt(2))
    psi = np.kron(cx, cy)
    return psi / np.linalg.norm(psi)


@dataclass(frozen=True)
class CoherentVarianceCheck:
    variance: float
    s3_mean: float
    ratio: float | None
    degenerate: bool


def coherent_dark_plane_variance(alpha: complex, theta: float,
                                 space: TruncatedTwoModeSpace) -> CoherentVarianceCheck:
    """Exact variance of S(theta) for the circular coherent state of amplitude alpha.

    ``ratio`` is variance / |<S3>|, which should be 1 (shot noise). For
    alpha = 0 there is no carrier: the variance is returned but ``ratio`` is
    None and ``degenerate`` is set.
    """
    if abs(alpha) ** 2 > space.n_max / 4 * (1 + 1e-12):
        raise TruncationError(f"|alpha|^2 = {abs(alpha) ** 2:g} exceeds n_max/4 = {space.n_max / 4:g}")
    stokes = build_stokes_matrices(space)
    psi = circular_coherent_state(alpha, space)
    op = dark_plane_operator(stokes, theta).matrix
    mean = np.real(np.vdot(psi, op @ psi))
    second = np.real(np.vdot(psi, op @ (op @ psi)))
    variance = float(second - mean ** 2)
    s3 = stokes["S3"].expectation(psi)
    if abs(s3) < 1e-12:
        return CoherentVarianceCheck(variance, s3, None, True)
    return CoherentVarianceCheck(variance, s3, variance / abs(s3), False)


def normalized_coherent_variance(alpha: complex, theta: float, space: TruncatedTwoModeSpace) -> float:
    chk = coherent_dark_plane_variance(alpha, theta, space)
    if chk.degenerate:
        raise DegenerateNormalizationError("no S3 carrier: shot-noise reference is zero")
    return chk.ratio

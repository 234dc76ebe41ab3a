"""Stokes-operator domain model for circularly polarised beams.

All variances are shot-noise normalised: a coherent beam carrying the same
mean S3 has dark-plane variance 1. The mean S3 is kept as metadata only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import FluctuationBasis, LinearMap, wrap_angle
from .errors import InvalidArgumentError


@dataclass(frozen=True)
class StokesMean:
    """Mean Stokes vector in photon-number units."""

    s0: float
    s1: float = 0.0
    s2: float = 0.0
    s3: float = 0.0

    def __post_init__(self):
        if self.s0 < 0:
            raise InvalidArgumentError("s0 must be non-negative")

    @classmethod
    def circular(cls, n: float, handedness: int = 1) -> "StokesMean":
        return cls(s0=n, s3=float(np.sign(handedness)) * n)

    @property
    def is_circular(self) -> bool:
        return self.s1 == 0 and self.s2 == 0 and np.isclose(abs(self.s3), self.s0)


@dataclass(frozen=True)
class PolSqueezedSource:
    """A polarisation-squeezed input beam.

    ``v_sq`` and ``v_asq`` are the variances of S(theta_sq) and
    S(theta_sq + pi/2) in shot-noise units.
    """

    v_sq: float
    v_asq: float
    theta_sq: float = 0.0
    s3_mean: float = 1.0

    def __post_init__(self):
        if not (self.v_sq > 0 and self.v_asq > 0):
            raise InvalidArgumentError("source variances must be positive")
        # tolerance covers minimum-uncertainty states built as (v, 1/v)
        if self.v_sq * self.v_asq < 1.0 - 1e-12:
            raise InvalidArgumentError(
                f"v_sq * v_asq = {self.v_sq * self.v_asq:.6g} violates the dark-plane "
                "uncertainty relation")
        object.__setattr__(self, "theta_sq", wrap_angle(self.theta_sq))

    @classmethod
    def from_db(cls, sq_db: float, asq_db: float, theta_sq: float = 0.0,
                s3_mean: float = 1.0) -> "PolSqueezedSource":
        return cls(10 ** (sq_db / 10), 10 ** (asq_db / 10), theta_sq, s3_mean)

    @classmethod
    def coherent(cls, theta_sq: float = 0.0, s3_mean: float = 1.0) -> "PolSqueezedSource":
        return cls(1.0, 1.0, theta_sq, s3_mean)

    @property
    def excess_noise(self) -> float:
        """Anti-squeezing relative to a minimum-uncertainty state with the same v_sq."""
        return self.v_asq * self.v_sq


def rotation_matrix(delta: float) -> np.ndarray:
    """2x2 matrix sending (S(t), S(t+pi/2)) to (S(t+delta), S(t+delta+pi/2))."""
    c, s = np.cos(delta), np.sin(delta)
    return np.array([[c, s], [-s, c]])


def dark_plane_rotation_map(delta: float, beam: str = "A", theta: float = 0.0) -> LinearMap:
    """Rotation of one beam's dark-plane measurement axes by ``delta`` radians."""
    basis = FluctuationBasis.pairs([beam], theta)
    return LinearMap(rotation_matrix(delta), basis, basis.shifted(beam, delta))


def uncertainty_product(v_a: float, v_b: float) -> float:
    """Product of two conjugate normalised variances; physical states give >= bound.

    In normalised units the dark-plane bound is 1. The same product serves the
    other two Stokes uncertainty relations with a caller-supplied bound
    (see :func:`satisfies_uncertainty`).
    """
    if v_a <= 0 or v_b <= 0:
        raise InvalidArgumentError("variances must be positive")
    return v_a * v_b


def satisfies_uncertainty(v_a: float, v_b: float, bound: float = 1.0) -> bool:
    return uncertainty_product(v_a, v_b) >= bound


def is_polarisation_squeezed(src: PolSqueezedSource) -> bool:
    return src.v_sq < 1.0 < src.v_asq

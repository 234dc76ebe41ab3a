"""Labelled coordinates for dark-plane Stokes fluctuations and linear maps between them.

A coordinate is identified by ``(beam, angle)``: the fluctuation of
``S_beam(angle) = cos(angle) S1 + sin(angle) S2`` of that beam. Each beam in a
basis owns exactly two orthogonal directions, so the fluctuation along any
other dark-plane direction of that beam is a fixed linear combination of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgumentError, NumericalConsistencyError

TWO_PI = 2.0 * np.pi
ANGLE_ATOL = 1e-9


def wrap_angle(theta: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    w = float(np.mod(theta, TWO_PI))
    # np.mod can return exactly 2*pi for tiny negative inputs
    return 0.0 if np.isclose(w, TWO_PI, rtol=0.0, atol=ANGLE_ATOL) else w


def same_angle(a: float, b: float, atol: float = ANGLE_ATOL) -> bool:
    d = abs(wrap_angle(a) - wrap_angle(b))
    return min(d, TWO_PI - d) <= atol


@dataclass(frozen=True)
class FluctuationBasis:
    """Ordered list of ``(beam, angle)`` labels, angles in radians."""

    labels: tuple[tuple[str, float], ...]

    def __post_init__(self):
        labels = tuple((str(b), wrap_angle(a)) for b, a in self.labels)
        object.__setattr__(self, "labels", labels)
        for i, (b, a) in enumerate(labels):
            for b2, a2 in labels[i + 1:]:
                if b == b2 and same_angle(a, a2):
                    raise InvalidArgumentError(f"duplicate basis label {(b, a)}")
        for beam in self.beams:
            idx = self.beam_indices(beam)
            if len(idx) != 2:
                raise InvalidArgumentError(
                    f"beam {beam!r} needs exactly two coordinates, got {len(idx)}")
            a0, a1 = (labels[i][1] for i in idx)
            if abs(np.cos(a0 - a1)) > 1e-9:
                raise InvalidArgumentError(
                    f"coordinates of beam {beam!r} are not orthogonal dark-plane directions")

    @classmethod
    def pairs(cls, beams: Iterable[str], theta: float | Sequence[float] = 0.0) -> "FluctuationBasis":
        """Basis ``[b1(theta), b1(theta+pi/2), b2(theta), ...]``; theta may be per beam."""
        beams = list(beams)
        thetas = np.broadcast_to(np.asarray(theta, dtype=float), (len(beams),))
        labels = []
        for b, th in zip(beams, thetas):
            labels += [(b, th), (b, th + np.pi / 2)]
        return cls(tuple(labels))

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    @property
    def beams(self) -> tuple[str, ...]:
        seen: list[str] = []
        for b, _ in self.labels:
            if b not in seen:
                seen.append(b)
        return tuple(seen)

    def beam_indices(self, beam: str) -> list[int]:
        return [i for i, (b, _) in enumerate(self.labels) if b == beam]

    def index(self, beam: str, angle: float) -> int:
        for i, (b, a) in enumerate(self.labels):
            if b == beam and same_angle(a, angle):
                return i
        raise InvalidArgumentError(f"label {(beam, angle)} not in basis")

    def direction_weights(self, beam: str, angle: float) -> np.ndarray:
        """Weight vector expressing ``S_beam(angle)`` in this basis.

        For orthonormal directions a_i of the beam the coefficient on a_i is
        cos(angle - a_i); this covers directions outside the basis as well as
        sign-flipped ones (angle + pi gives -1).
        """
        idx = self.beam_indices(beam)
        if not idx:
            raise InvalidArgumentError(f"beam {beam!r} not in basis")
        w = np.zeros(len(self))
        for i in idx:
            c = np.cos(angle - self.labels[i][1])
            w[i] = 0.0 if abs(c) < 1e-15 else c
        return w

    def matches(self, other: "FluctuationBasis") -> bool:
        return len(self) == len(other) and all(
            b1 == b2 and same_angle(a1, a2)
            for (b1, a1), (b2, a2) in zip(self.labels, other.labels))

    def relabel(self, mapping: dict[str, str]) -> "FluctuationBasis":
        return FluctuationBasis(tuple((mapping.get(b, b), a) for b, a in self.labels))

    def shifted(self, beam: str, delta: float) -> "FluctuationBasis":
        """Same basis with every direction of ``beam`` rotated by ``delta``."""
        return FluctuationBasis(tuple(
            (b, a + delta if b == beam else a) for b, a in self.labels))


@dataclass(frozen=True)
class LinearMap:
    """Real matrix taking fluctuations on ``in_basis`` to fluctuations on ``out_basis``."""

    matrix: np.ndarray
    in_basis: FluctuationBasis
    out_basis: FluctuationBasis

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if m.shape != (len(self.out_basis), len(self.in_basis)):
            raise InvalidArgumentError(
                f"matrix shape {m.shape} inconsistent with bases "
                f"({len(self.out_basis)}, {len(self.in_basis)})")

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        """Composition: ``(self @ other)`` applies ``other`` first."""
        if not self.in_basis.matches(other.out_basis):
            raise InvalidArgumentError("cannot compose maps: basis mismatch")
        return LinearMap(self.matrix @ other.matrix, other.in_basis, self.out_basis)

    @classmethod
    def identity(cls, basis: FluctuationBasis) -> "LinearMap":
        return cls(np.eye(len(basis)), basis, basis)

    def orthogonality_error(self) -> float:
        m = self.matrix
        if m.shape[0] != m.shape[1]:
            return np.inf
        return float(np.max(np.abs(m @ m.T - np.eye(m.shape[0]))))

    def assert_orthogonal(self, atol: float = 1e-12) -> None:
        err = self.orthogonality_error()
        if err > atol:
            raise NumericalConsistencyError(f"map is not orthogonal (max |M M^T - I| = {err:.3e})")

"""Two polarisation-squeezed beams A, B interfered on a beam splitter into C, D.

Input basis is ``[A(th), A(th+pi/2), B(th), B(th+pi/2)]`` with ``th`` the
squeezing angle of source A; outputs use the same directions for C and D.
Beam-splitter coefficients are the intensity transmittance T and reflectance
R = 1 - T, with cross terms sqrt(RT); the resulting 4x4 map is orthogonal
because (T + R)^2 = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import FluctuationBasis, LinearMap
from .errors import DomainError, InconsistencyError, InvalidArgumentError, UnsupportedConfigurationError
from .gaussian import CovarianceModel, propagate
from .stokes import PolSqueezedSource, rotation_matrix

HALF_PI = np.pi / 2

# Input sources as characterised with blocked arms (-4.2/+19.7 dB and -4.0/+19.6 dB),
# squeezing angle about 4.5 degrees.
MEASURED_SOURCE_A = PolSqueezedSource.from_db(-4.2, 19.7, np.radians(4.5))
MEASURED_SOURCE_B = PolSqueezedSource.from_db(-4.0, 19.6, np.radians(4.5))


def averaged_source(a: PolSqueezedSource, b: PolSqueezedSource) -> PolSqueezedSource:
    """Symmetric stand-in for a slightly unequal pair: linear means of the variances."""
    return PolSqueezedSource((a.v_sq + b.v_sq) / 2, (a.v_asq + b.v_asq) / 2,
                             a.theta_sq, (a.s3_mean + b.s3_mean) / 2)


@dataclass(frozen=True)
class BeamSplitterSpec:
    t: float
    relative_phase: float = HALF_PI

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise InvalidArgumentError(f"transmittance {self.t} outside [0, 1]")

    @property
    def r(self) -> float:
        return 1.0 - self.t

    @property
    def gamma(self) -> float:
        """Optimised measurement rotation: cos(gamma) = sqrt(T), sin(gamma) = sqrt(R)."""
        return float(np.arctan2(np.sqrt(self.r), np.sqrt(self.t)))

    def _check_phase(self):
        if not np.isclose(self.relative_phase, HALF_PI, rtol=0.0, atol=1e-12):
            raise UnsupportedConfigurationError(
                "only a pi/2 relative phase between the inputs is supported")


@dataclass(frozen=True)
class DetectionImperfections:
    efficiency_c: float = 1.0
    efficiency_d: float = 1.0
    visibility: float = 1.0
    angle_error_c: float = 0.0
    angle_error_d: float = 0.0

    def __post_init__(self):
        for name in ("efficiency_c", "efficiency_d", "visibility"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidArgumentError(f"{name} = {v} outside [0, 1]")

    @property
    def is_ideal(self) -> bool:
        return (self.efficiency_c == 1 and self.efficiency_d == 1 and self.visibility == 1
                and self.angle_error_c == 0 and self.angle_error_d == 0)


def input_basis(theta: float = 0.0) -> FluctuationBasis:
    return FluctuationBasis.pairs(["A", "B"], theta)


def output_basis(theta: float = 0.0) -> FluctuationBasis:
    return FluctuationBasis.pairs(["C", "D"], theta)


def input_covariance(a: PolSqueezedSource, b: PolSqueezedSource) -> CovarianceModel:
    """Independent sources: block diagonal, expressed along A's squeezing directions.

    When B's squeezing angle differs, its diagonal block is rotated into A's frame.
    """
    basis = input_basis(a.theta_sq)
    rot = rotation_matrix(a.theta_sq - b.theta_sq)
    block_b = rot @ np.diag([b.v_sq, b.v_asq]) @ rot.T
    m = np.zeros((4, 4))
    m[:2, :2] = np.diag([a.v_sq, a.v_asq])
    m[2:, 2:] = block_b
    return CovarianceModel(basis, m)


def entangling_bs_map(bs: BeamSplitterSpec, theta: float = 0.0) -> LinearMap:
    bs._check_phase()
    t, r = bs.t, bs.r
    q = np.sqrt(r * t)
    m = np.array([
        [t, q, r, -q],    # C(th)
        [-q, t, q, r],    # C(th + pi/2)
        [r, -q, t, q],    # D(th)
        [q, r, -q, t],    # D(th + pi/2)
    ])
    lmap = LinearMap(m, input_basis(theta), output_basis(theta))
    lmap.assert_orthogonal()
    return lmap


def beam_rotation_map(basis: FluctuationBasis, deltas: dict[str, float], relabel: bool = True) -> LinearMap:
    """Rotate the measurement axes of the named beams.

    Row i measures S_beam(a_i + delta). With ``relabel`` the output labels
    carry the rotated angles; without it they keep the intended angles, which
    models a misset wave plate.
    """
    rows = []
    out = []
    for beam, angle in basis:
        d = deltas.get(beam, 0.0)
        rows.append(basis.direction_weights(beam, angle + d))
        out.append((beam, angle + d if relabel else angle))
    return LinearMap(np.array(rows), basis, FluctuationBasis(tuple(out)))


def optimized_direction_map(bs: BeamSplitterSpec, theta: float = 0.0) -> LinearMap:
    """Inputs to C, D measured along th - gamma and th + pi/2 - gamma."""
    bs._check_phase()
    st, sr = np.sqrt(bs.t), np.sqrt(bs.r)
    m = np.array([
        [st, 0.0, 0.0, -sr],   # C(th - gamma)
        [0.0, st, sr, 0.0],    # C(th + pi/2 - gamma)
        [0.0, -sr, st, 0.0],   # D(th - gamma)
        [sr, 0.0, 0.0, st],    # D(th + pi/2 - gamma)
    ])
    g = bs.gamma
    out = FluctuationBasis.pairs(["C", "D"], theta - g)
    lmap = LinearMap(m, input_basis(theta), out)
    composed = beam_rotation_map(output_basis(theta), {"C": -g, "D": -g}) @ entangling_bs_map(bs, theta)
    err = np.max(np.abs(composed.matrix - m))
    if err > 1e-12:
        raise AssertionError(f"optimised map disagrees with rotated splitter map by {err:.2e}")
    lmap.assert_orthogonal()
    return lmap


def _mix_with_vacuum(cov: CovarianceModel, efficiencies: dict[str, float]) -> CovarianceModel:
    scale = np.array([np.sqrt(efficiencies.get(b, 1.0)) for b, _ in cov.basis])
    m = cov.matrix * np.outer(scale, scale) + np.diag(1.0 - scale ** 2)
    return CovarianceModel(cov.basis, m)


def _apply_visibility(cov: CovarianceModel, visibility: float) -> CovarianceModel:
    # mode mismatch: cross-beam terms keep a fraction v^2, the rest is uncorrelated
    same_beam = np.array([[b1 == b2 for b2, _ in cov.basis] for b1, _ in cov.basis])
    m = np.where(same_beam, cov.matrix, visibility ** 2 * cov.matrix)
    return CovarianceModel(cov.basis, m)


def apply_detection(cov: CovarianceModel, imp: DetectionImperfections,
                    beams: tuple[str, str] = ("C", "D")) -> CovarianceModel:
    """Visibility, then detector loss, then wave-plate angle errors, per output beam."""
    c, d = beams
    out = _apply_visibility(cov, imp.visibility)
    out = _mix_with_vacuum(out, {c: imp.efficiency_c, d: imp.efficiency_d})
    if imp.angle_error_c or imp.angle_error_d:
        errmap = beam_rotation_map(out.basis, {c: imp.angle_error_c, d: imp.angle_error_d}, relabel=False)
        out = propagate(errmap, out)
    return out


def output_covariance(a: PolSqueezedSource, b: PolSqueezedSource, bs: BeamSplitterSpec,
                      imp: DetectionImperfections | None = None) -> CovarianceModel:
    """Covariance of C, D along A's squeezing directions, after optional detection effects."""
    cov = propagate(entangling_bs_map(bs, a.theta_sq), input_covariance(a, b))
    if imp is not None:
        cov = apply_detection(cov, imp)
    return cov


def forward_blocked(v_in: float, t: float) -> float:
    """Variance seen behind the splitter when the other input is blocked (vacuum)."""
    return t * v_in + (1.0 - t)


def blocked_arm_inference(measured: float, t: float) -> float:
    """Input variance that explains ``measured`` once the splitter's vacuum is removed."""
    if not 0.0 < t <= 1.0:
        raise DomainError("transmittance must lie in (0, 1]")
    if measured <= 1.0 - t:
        raise DomainError(f"measured variance {measured} <= vacuum contribution {1 - t}")
    return (measured - (1.0 - t)) / t


def sq_sum_correlation(a: PolSqueezedSource, b: PolSqueezedSource) -> float:
    """Closed form of the normalised C(th) + D(th) variance; independent of T."""
    return (a.v_sq + b.v_sq) / 2


def asq_difference_correlation(t: float, a: PolSqueezedSource, b: PolSqueezedSource) -> float:
    """Closed form of the normalised C(th+pi/2) - D(th+pi/2) variance."""
    r = 1.0 - t
    return ((t - r) ** 2 * (a.v_asq + b.v_asq) + 4 * r * t * (a.v_sq + b.v_sq)) / 2


@dataclass(frozen=True)
class SplittingEstimate:
    t: float
    r: float

    @property
    def imbalance(self) -> float:
        return self.t - self.r


def infer_splitting_from_asq_correlation(measured_norm: float, a: PolSqueezedSource,
                                         b: PolSqueezedSource) -> SplittingEstimate:
    """Invert the anti-squeezed difference correlation for the splitting ratio (T >= 1/2 root).

    With u = (T - R)^2 and 4RT = 1 - u the correlation is linear in u.
    """
    floor = (a.v_sq + b.v_sq) / 2
    slope = (a.v_asq + b.v_asq) / 2 - floor
    if measured_norm < floor:
        raise InconsistencyError(
            f"measured {measured_norm} below the symmetric-splitter floor {floor:.6g}", floor=floor)
    if slope <= 0:
        raise InconsistencyError("sources carry no anti-squeezing excess; ratio unidentifiable", floor=floor)
    u = (measured_norm - floor) / slope
    if u >= 1.0:
        raise InconsistencyError(
            f"measured {measured_norm} exceeds the fully unbalanced limit", floor=floor)
    diff = np.sqrt(u)
    t = (1.0 + diff) / 2
    return SplittingEstimate(t, 1.0 - t)

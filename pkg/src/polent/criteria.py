"""Entanglement witnesses for the C, D output pair and the electronic-gain optimiser.

Correlation signals are gain-weighted sums of two measured dark-plane Stokes
parameters. Their shot-noise reference is the sum of the squared gains, so a
normalised variance below 1 means sub-shot-noise correlations.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .basis import FluctuationBasis
from .entangle import beam_rotation_map
from .errors import (DegenerateNormalizationError, DomainError, InvalidArgumentError,
                     NotApplicableError, OptimizerAmbiguityError)
from .gaussian import CovarianceModel, normalized_combo_variance, propagate

GAIN_BOUNDS = (1e-3, 1e3)
GAIN_RTOL = 1e-10
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0

EOF_NOTE = "symmetric Gaussian-state closed form (cited result), not measured"


@dataclass(frozen=True)
class Term:
    beam: str
    angle: float


@dataclass(frozen=True)
class CorrelationCombo:
    """Signal ``first + g*second`` ("partner") or ``g*first + second/g`` ("reciprocal")."""

    first: Term
    second: Term
    gain: float = 1.0
    mode: str = "partner"
    label: str = ""

    def __post_init__(self):
        if self.mode not in ("partner", "reciprocal"):
            raise InvalidArgumentError(f"unknown gain mode {self.mode!r}")
        if not self.gain > 0:
            raise InvalidArgumentError("gains must be positive")

    def coefficients(self, gain: float | None = None) -> tuple[float, float]:
        g = self.gain if gain is None else gain
        if self.mode == "partner":
            return 1.0, g
        return g, 1.0 / g

    def weights(self, basis: FluctuationBasis, gain: float | None = None) -> np.ndarray:
        c1, c2 = self.coefficients(gain)
        return (c1 * basis.direction_weights(self.first.beam, self.first.angle)
                + c2 * basis.direction_weights(self.second.beam, self.second.angle))

    def with_gain(self, gain: float) -> "CorrelationCombo":
        return replace(self, gain=gain)

    def relabel(self, mapping: dict[str, str]) -> "CorrelationCombo":
        return replace(self,
                       first=Term(mapping.get(self.first.beam, self.first.beam), self.first.angle),
                       second=Term(mapping.get(self.second.beam, self.second.beam), self.second.angle))


def sq_sum_combo(theta: float = 0.0, g: float = 1.0) -> CorrelationCombo:
    """C(th) + g D(th)."""
    return CorrelationCombo(Term("C", theta), Term("D", theta), g, "partner", "sum correlation (sq)")


def asq_difference_combo(theta: float = 0.0, h: float = 1.0) -> CorrelationCombo:
    """C(th + pi/2) + h D(th - pi/2), i.e. the difference of the anti-squeezed parameters."""
    return CorrelationCombo(Term("C", theta + np.pi / 2), Term("D", theta - np.pi / 2), h, "partner",
                            "difference correlation (asq)")


def opt_combo(theta: float, gamma: float, k: float = 1.0) -> CorrelationCombo:
    """k C(th - gamma) + (1/k) D(th + pi/2 - gamma)."""
    return CorrelationCombo(Term("C", theta - gamma), Term("D", theta + np.pi / 2 - gamma), k,
                            "reciprocal", "opt correlation (k)")


def opt_conjugate_combo(theta: float, gamma: float, l: float = 1.0) -> CorrelationCombo:
    """(1/l) C(th + pi/2 - gamma) + l D(th - gamma)."""
    return CorrelationCombo(Term("D", theta - gamma), Term("C", theta + np.pi / 2 - gamma), l,
                            "reciprocal", "opt correlation (l)")


def cross_pair_combos(theta: float = 0.0) -> tuple[CorrelationCombo, CorrelationCombo]:
    """C(th) + D(th + pi/2) and C(th + pi/2) + D(th)."""
    return (CorrelationCombo(Term("C", theta), Term("D", theta + np.pi / 2), label="cross (1)"),
            CorrelationCombo(Term("C", theta + np.pi / 2), Term("D", theta), label="cross (2)"))


def combo_value(cov: CovarianceModel, combo: CorrelationCombo, gain: float | None = None) -> float:
    return normalized_combo_variance(cov, combo.weights(cov.basis, gain))


@dataclass(frozen=True)
class GainOptimum:
    g_opt: float
    v_min: float


def _golden_min(f, lo: float, hi: float, tol: float) -> float:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def optimize_gain(cov: CovarianceModel, combo: CorrelationCombo, n_check: int = 241) -> GainOptimum:
    """Minimise the normalised combo variance over g in [1e-3, 1e3].

    Golden-section search on log g. The profile is sampled first: a flat
    profile returns g = 1, more than one valley raises OptimizerAmbiguityError.
    """
    lo, hi = np.log(GAIN_BOUNDS[0]), np.log(GAIN_BOUNDS[1])

    def f(x):
        return combo_value(cov, combo, float(np.exp(x)))

    xs = np.linspace(lo, hi, n_check)
    ys = np.array([f(x) for x in xs])
    scale = float(np.max(np.abs(ys)))
    if np.ptp(ys) <= 1e-12 * max(scale, 1.0):
        return GainOptimum(1.0, combo_value(cov, combo, 1.0))
    steps = np.diff(ys)
    signs = np.sign(np.where(np.abs(steps) > 1e-13 * scale, steps, 0.0))
    signs = signs[signs != 0]
    valleys = int(np.sum((signs[:-1] < 0) & (signs[1:] > 0)))
    if valleys > 1:
        raise OptimizerAmbiguityError("gain profile has several local minima", samples=(xs, ys))

    i = int(np.argmin(ys))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, n_check - 1)]
    x = _golden_min(f, a, b, GAIN_RTOL)
    g = float(np.exp(x))
    return GainOptimum(g, f(x))


def closed_form_gain(t: float, r: float, v_sq: float, v_asq: float) -> float:
    """g = ((T V_sq + R V_asq) / (T V_asq + R V_sq))^(1/4), evaluated verbatim.

    This is the published gain rule for the optimised-direction signals; it is
    reported next to :func:`optimize_gain` because it does not coincide with
    the minimiser of the normalised variance (that sits at g^2 = sqrt(T/R)).
    """
    if min(t, r, v_sq, v_asq) <= 0:
        raise InvalidArgumentError("closed-form gain needs positive T, R and variances")
    return float(((t * v_sq + r * v_asq) / (t * v_asq + r * v_sq)) ** 0.25)


def cancelling_gain(t: float) -> float:
    """Gain that removes the anti-squeezed input from the optimised-direction signals."""
    return float((t / (1.0 - t)) ** 0.25)


def conditional_variance(cov: CovarianceModel, u: tuple[str, float], w: tuple[str, float]) -> float:
    """Variance of u left after the best linear estimate from w: V_u - Cov(u, w)^2 / V_w."""
    vw = cov.variance(*w)
    if vw <= 0:
        raise DegenerateNormalizationError(f"conditioning variable {w} has zero variance")
    return cov.variance(*u) - cov.covariance(u, w) ** 2 / vw


def epr_reid(cov: CovarianceModel, pair_x, pair_p) -> float:
    """Product of the two inferred (conditional) variances; < 1 demonstrates EPR correlations.

    Each pair is ``(inferred_label, conditioning_label)`` with labels ``(beam, angle)``.
    """
    return conditional_variance(cov, *pair_x) * conditional_variance(cov, *pair_p)


def eof_symmetric(v1: float, v2: float, auto_variances: tuple[float, float] | None = None,
                  rtol: float = 0.01) -> Optional[float]:
    """Entanglement of formation (ebits) of a symmetric state from its correlation pair.

    With D = sqrt(v1 v2) and c+- = (D^-1/2 +- D^1/2)^2 / 4 the value is
    c+ log2 c+ - c- log2 c-. Returns None when D > 1 (no entanglement
    certified); D = 1 gives 0.
    """
    if v1 <= 0 or v2 <= 0:
        raise DomainError("correlation variances must be positive")
    if auto_variances is not None:
        a, b = auto_variances
        if abs(a - b) > rtol * max(abs(a), abs(b)):
            raise NotApplicableError(
                f"state not symmetric: auto-variances {a:.6g} and {b:.6g} differ by more than {rtol:.0%}")
    delta = np.sqrt(v1 * v2)
    if delta > 1.0:
        return None
    c_plus = (delta ** -0.5 + delta ** 0.5) ** 2 / 4
    c_minus = (delta ** -0.5 - delta ** 0.5) ** 2 / 4
    minus_term = c_minus * np.log2(c_minus) if c_minus > 0 else 0.0
    return float(c_plus * np.log2(c_plus) - minus_term)


@dataclass(frozen=True)
class WitnessReport:
    combo_variances: tuple[float, float]
    epr_product: float | None = None
    eof_ebits: float | None = None
    gains: tuple[float, float] | None = None
    labels: tuple[str, str] = ("", "")
    product_root: float = field(init=False)

    def __post_init__(self):
        v1, v2 = self.combo_variances
        object.__setattr__(self, "product_root", float(np.sqrt(v1 * v2)))

    @property
    def nonseparable(self) -> bool:
        return self.product_root < 1.0

    @property
    def epr(self) -> bool | None:
        return None if self.epr_product is None else self.epr_product < 1.0

    def to_dict(self) -> dict:
        """Serialisable form; all variances in shot-noise units, EOF in ebits."""
        return {
            "combo_labels": list(self.labels),
            "combo_variances": [float(v) for v in self.combo_variances],
            "gains": None if self.gains is None else [float(g) for g in self.gains],
            "product_root": self.product_root,
            "epr_product": self.epr_product,
            "eof_ebits": self.eof_ebits,
            "eof_note": EOF_NOTE if self.eof_ebits is not None else None,
            "verdict_nonseparable": self.nonseparable,
            "verdict_epr": self.epr,
        }


def witness_from_variances(v1: float, v2: float, with_eof: bool = True) -> WitnessReport:
    """Product criterion (and symmetric-state EOF) from two measured normalised variances."""
    eof = eof_symmetric(v1, v2) if with_eof else None
    return WitnessReport((float(v1), float(v2)), eof_ebits=eof)


def _check_labels(cov: CovarianceModel, combo: CorrelationCombo):
    for term in (combo.first, combo.second):
        if term.beam not in cov.basis.beams:
            raise InvalidArgumentError(f"combo refers to beam {term.beam!r} absent from the basis")


def nonseparability_product(cov: CovarianceModel, combo1: CorrelationCombo, combo2: CorrelationCombo,
                            optimize: bool = False, epr_pairs=None) -> WitnessReport:
    """Evaluate the product criterion sqrt(V1 V2) < 1 for two correlation signals.

    With ``optimize`` each combo's gain is chosen by :func:`optimize_gain`.
    ``epr_pairs`` (``(pair_x, pair_p)``) adds the conditional-variance product.
    """
    _check_labels(cov, combo1)
    _check_labels(cov, combo2)
    values, gains = [], []
    for combo in (combo1, combo2):
        if optimize:
            opt = optimize_gain(cov, combo)
            values.append(opt.v_min)
            gains.append(opt.g_opt)
        else:
            values.append(combo_value(cov, combo))
            gains.append(combo.gain)
    epr = epr_reid(cov, *epr_pairs) if epr_pairs is not None else None
    return WitnessReport(tuple(values), epr_product=epr, gains=tuple(gains),
                         labels=(combo1.label, combo2.label))


def quarter_wave_relabel(cov: CovarianceModel, beam: str = "D") -> CovarianceModel:
    """Rotate one beam's phase space by 90 degrees: S(th) -> S(th+pi/2), S(th+pi/2) -> -S(th)."""
    return propagate(beam_rotation_map(cov.basis, {beam: np.pi / 2}, relabel=False), cov)


def cross_pairing_product(cov: CovarianceModel, theta: float = 0.0, beam: str = "D") -> WitnessReport:
    """Product criterion for C(th)+D(th+pi/2) and C(th+pi/2)+D(th).

    Implemented by rotating beam D by 90 degrees and evaluating the sum and
    difference signals of the standard pairing.
    """
    rotated = quarter_wave_relabel(cov, beam)
    sum_c = sq_sum_combo(theta)
    diff_c = CorrelationCombo(Term("C", theta + np.pi / 2), Term("D", theta + 3 * np.pi / 2),
                              label="difference")
    return nonseparability_product(rotated, sum_c, diff_c)

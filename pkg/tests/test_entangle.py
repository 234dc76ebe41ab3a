import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polent import (BeamSplitterSpec, CovarianceModel, DetectionImperfections, PolSqueezedSource, apply_detection,
                    combo_value, entangling_bs_map, input_covariance, optimized_direction_map, output_covariance,
                    propagate)
from polent.criteria import asq_difference_combo, sq_sum_combo
from polent.entangle import (asq_difference_correlation, averaged_source, beam_rotation_map,
                             blocked_arm_inference, forward_blocked, infer_splitting_from_asq_correlation,
                             output_basis, sq_sum_correlation)
from polent.errors import (DomainError, InconsistencyError, InvalidArgumentError,
                           UnsupportedConfigurationError)
from polent.verify import opt_pair_values

TH = np.radians(4.5)
ts = st.floats(0.0, 1.0)


def test_balanced_splitter_first_row():
    m = entangling_bs_map(BeamSplitterSpec(0.5)).matrix
    assert np.allclose(m[0], [0.5, 0.5, 0.5, -0.5], atol=1e-15)


def test_full_transmission_is_identity():
    m = entangling_bs_map(BeamSplitterSpec(1.0)).matrix
    assert np.array_equal(m, np.eye(4))


@given(ts)
def test_splitter_map_orthogonal(t):
    assert entangling_bs_map(BeamSplitterSpec(t)).orthogonality_error() <= 1e-12


@given(ts)
def test_vacuum_in_vacuum_out(t):
    m = entangling_bs_map(BeamSplitterSpec(t))
    out = propagate(m, CovarianceModel.shot_noise(m.in_basis))
    assert np.allclose(out.matrix, np.eye(4), atol=1e-12)


@settings(max_examples=50)
@given(ts)
def test_sum_correlation_independent_of_t(t):
    a, b = PolSqueezedSource.from_db(-4.2, 19.7, TH), PolSqueezedSource.from_db(-4.0, 19.6, TH)
    cov = output_covariance(a, b, BeamSplitterSpec(t))
    assert combo_value(cov, sq_sum_combo(TH)) == pytest.approx(sq_sum_correlation(a, b), abs=1e-12)


def test_sum_correlation_value(sources):
    assert sq_sum_correlation(*sources) == pytest.approx(0.389148, abs=1e-6)


@pytest.mark.parametrize("t", [0.5, 0.52, 0.6, 0.9])
def test_asq_closed_form_matches_model(sources, t):
    cov = output_covariance(*sources, BeamSplitterSpec(t))
    assert combo_value(cov, asq_difference_combo(TH)) == pytest.approx(
        asq_difference_correlation(t, *sources), rel=1e-12)


def test_asq_difference_grows_with_imbalance(sources):
    imbalance = np.linspace(0.0, 0.9, 10)
    values = [asq_difference_correlation((1 + d) / 2, *sources) for d in imbalance]
    assert np.all(np.diff(values) > 0)
    assert values[0] == pytest.approx(sq_sum_correlation(*sources), rel=1e-14)


def test_output_excess_noise_at_balance(sources):
    cov = output_covariance(*sources, BeamSplitterSpec(0.5))
    assert np.allclose(np.diag(cov.matrix), 46.326, atol=1e-3)


@given(st.floats(0.01, 0.99))
def test_optimized_map_is_rotated_splitter(t):
    bs = BeamSplitterSpec(t)
    g = bs.gamma
    composed = beam_rotation_map(output_basis(), {"C": -g, "D": -g}) @ entangling_bs_map(bs)
    assert np.allclose(optimized_direction_map(bs).matrix, composed.matrix, atol=1e-12)


@pytest.mark.parametrize("t, deg", [(0.5, 45.0), (1.0, 0.0), (0.521, 43.797)])
def test_gamma(t, deg):
    assert np.degrees(BeamSplitterSpec(t).gamma) == pytest.approx(deg, abs=1e-3)


def test_unsupported_phase():
    with pytest.raises(UnsupportedConfigurationError):
        entangling_bs_map(BeamSplitterSpec(0.5, relative_phase=0.0))
    with pytest.raises(UnsupportedConfigurationError):
        optimized_direction_map(BeamSplitterSpec(0.5, relative_phase=np.pi))


@pytest.mark.parametrize("t", [-0.1, 1.5])
def test_splitter_rejects_bad_transmittance(t):
    with pytest.raises(InvalidArgumentError):
        BeamSplitterSpec(t)


def test_input_covariance_rotates_misaligned_source():
    a = PolSqueezedSource(0.5, 4.0, 0.0)
    b = PolSqueezedSource(0.5, 4.0, np.pi / 2)
    cov = input_covariance(a, b)
    # B is squeezed along A's anti-squeezed direction
    assert cov.variance("B", 0.0) == pytest.approx(4.0)
    assert cov.variance("B", np.pi / 2) == pytest.approx(0.5)


def test_averaged_source(sources):
    avg = averaged_source(*sources)
    assert avg.v_sq == pytest.approx(0.389148, abs=1e-6)
    assert avg.v_asq == pytest.approx(92.263, abs=1e-3)


# detection model

def test_ideal_detection_is_identity(sources):
    cov = output_covariance(*sources, BeamSplitterSpec(0.5))
    imp = DetectionImperfections()
    assert imp.is_ideal
    assert np.allclose(apply_detection(cov, imp).matrix, cov.matrix, atol=1e-15)


def test_zero_efficiency_gives_vacuum(sources):
    cov = output_covariance(*sources, BeamSplitterSpec(0.5))
    out = apply_detection(cov, DetectionImperfections(efficiency_c=0.0, efficiency_d=0.0))
    assert np.allclose(out.matrix, np.eye(4), atol=1e-15)


@settings(max_examples=50)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(-0.1, 0.1), st.floats(-0.1, 0.1))
def test_coherent_light_stays_at_shot_noise(eta_c, eta_d, vis, dc, dd):
    cov = CovarianceModel.shot_noise(output_basis())
    out = apply_detection(cov, DetectionImperfections(eta_c, eta_d, vis, dc, dd))
    assert np.all(np.diag(out.matrix) >= 1 - 1e-12)


def test_loss_degrades_sum_correlation(sources):
    cov = output_covariance(*sources, BeamSplitterSpec(0.5))
    out = apply_detection(cov, DetectionImperfections(efficiency_c=0.9, efficiency_d=0.9))
    v = sq_sum_correlation(*sources)
    assert combo_value(out, sq_sum_combo(TH)) == pytest.approx(0.9 * v + 0.1, rel=1e-12)


def test_visibility_scales_cross_terms(sources):
    cov = output_covariance(*sources, BeamSplitterSpec(0.5))
    out = apply_detection(cov, DetectionImperfections(visibility=0.9))
    assert np.allclose(out.matrix[:2, 2:], 0.81 * cov.matrix[:2, 2:])
    assert np.allclose(out.matrix[:2, :2], cov.matrix[:2, :2])


def test_angle_error_on_optimised_pair():
    imp = DetectionImperfections(angle_error_c=np.radians(1.2), angle_error_d=np.radians(1.2))
    vk, vl = opt_pair_values(0.521, imp)
    assert 0.42 <= vk <= 0.48 and 0.42 <= vl <= 0.48
    assert vk == pytest.approx(0.421, abs=1e-3)
    assert vl == pytest.approx(0.438, abs=1e-3)


def test_opposite_angle_errors_cancel_leakage():
    same = opt_pair_values(0.521, DetectionImperfections(angle_error_c=0.02, angle_error_d=0.02))
    opposite = opt_pair_values(0.521, DetectionImperfections(angle_error_c=0.02, angle_error_d=-0.02))
    assert np.sqrt(np.prod(opposite)) < np.sqrt(np.prod(same))


@pytest.mark.parametrize("field", ["efficiency_c", "visibility"])
def test_detection_rejects_out_of_range(field):
    with pytest.raises(InvalidArgumentError):
        DetectionImperfections(**{field: 1.2})


# blocked-arm characterisation and splitting inference

def test_blocked_arm_example():
    assert blocked_arm_inference(0.69, 0.5) == pytest.approx(0.38, abs=1e-12)
    assert forward_blocked(0.38, 0.5) == pytest.approx(0.69, abs=1e-12)


@given(st.floats(0.05, 1.0), st.floats(0.01, 200.0))
def test_blocked_arm_round_trip(t, v):
    assert blocked_arm_inference(forward_blocked(v, t), t) == pytest.approx(v, rel=1e-9)


def test_blocked_arm_shot_noise_fixed_point():
    assert blocked_arm_inference(1.0, 0.3) == pytest.approx(1.0)


@pytest.mark.parametrize("measured, t", [(0.4, 0.5), (0.5, 0.5), (1.0, 0.0)])
def test_blocked_arm_domain(measured, t):
    with pytest.raises(DomainError):
        blocked_arm_inference(measured, t)


def test_splitting_inference(sources):
    est = infer_splitting_from_asq_correlation(0.55, *sources)
    assert abs(est.imbalance) == pytest.approx(0.042, abs=0.003)
    assert est.t == pytest.approx(0.52092, abs=1e-5)
    cov = output_covariance(*sources, BeamSplitterSpec(est.t))
    assert combo_value(cov, asq_difference_combo(TH)) == pytest.approx(0.55, abs=1e-9)


def test_splitting_inference_at_floor(sources):
    est = infer_splitting_from_asq_correlation(sq_sum_correlation(*sources), *sources)
    assert est.t == pytest.approx(0.5)


def test_splitting_inference_below_floor(sources):
    with pytest.raises(InconsistencyError) as info:
        infer_splitting_from_asq_correlation(0.3, *sources)
    assert info.value.floor == pytest.approx(0.389148, abs=1e-6)

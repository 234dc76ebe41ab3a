"""Continuous-variable polarisation entanglement from two polarisation-squeezed beams."""

from .basis import FluctuationBasis, LinearMap, wrap_angle
from .criteria import (CorrelationCombo, GainOptimum, Term, WitnessReport, asq_difference_combo,
                       cancelling_gain, closed_form_gain, combo_value, cross_pairing_product, eof_symmetric,
                       epr_reid, nonseparability_product, opt_combo, opt_conjugate_combo,
                       optimize_gain, sq_sum_combo, witness_from_variances)
from .entangle import (MEASURED_SOURCE_A, MEASURED_SOURCE_B, BeamSplitterSpec, DetectionImperfections,
                       apply_detection, blocked_arm_inference, entangling_bs_map, forward_blocked,
                       infer_splitting_from_asq_correlation, input_covariance, optimized_direction_map,
                       output_covariance)
from .gaussian import (CovarianceModel, MCConfig, MCResult, combo_variance, mc_validate,
                       normalized_combo_variance, propagate)
from .metrology import db_to_lin, error_bar_propagation, lin_to_db, subtract_electronic_noise
from .stokes import (PolSqueezedSource, StokesMean, dark_plane_rotation_map, is_polarisation_squeezed,
                     uncertainty_product)

__version__ = "0.1.0"

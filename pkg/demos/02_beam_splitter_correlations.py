"""Two squeezed beams on a splitter: what the outputs look like on their own and together.

Each output alone is very noisy because it inherits half of both
anti-squeezed inputs. The sum along the squeezed direction keeps the input
squeezing for any splitting ratio. The difference along the anti-squeezed
direction only reaches that floor for a balanced splitter, which lets us
read the splitting ratio back from a measured value.
"""

from polent import (MEASURED_SOURCE_A as A, MEASURED_SOURCE_B as B, BeamSplitterSpec, asq_difference_combo,
                    combo_value, infer_splitting_from_asq_correlation, lin_to_db, output_covariance, sq_sum_combo)

th = A.theta_sq
print("T      var C(sq) [dB]   sum (sq)   diff (asq)")
for t in (0.45, 0.5, 0.52, 0.55):
    cov = output_covariance(A, B, BeamSplitterSpec(t))
    print(f"{t:.2f}   {lin_to_db(cov.variance('C', th)):8.3f}       "
          f"{combo_value(cov, sq_sum_combo(th)):.4f}     {combo_value(cov, asq_difference_combo(th)):.4f}")

est = infer_splitting_from_asq_correlation(0.55, A, B)
print(f"\na measured anti-squeezed difference of 0.55 implies T = {est.t:.4f}, |T-R| = {est.imbalance:.4f}")

"""Rotating both detectors by gamma undoes the splitter's mixing.

With cos(gamma) = sqrt(T) and a gain of (T/R)^(1/4) the anti-squeezed input
drops out of each signal, so each pair reaches one source's squeezed
variance. The published closed-form gain is printed next to the numerical
optimum for comparison. A small wave-plate misset brings back some
anti-squeezed noise.
"""

import numpy as np

from polent import (MEASURED_SOURCE_A as A, MEASURED_SOURCE_B as B, BeamSplitterSpec, DetectionImperfections,
                    apply_detection, cancelling_gain, closed_form_gain, combo_value, input_covariance, opt_combo,
                    opt_conjugate_combo, optimize_gain, optimized_direction_map, propagate)

th = A.theta_sq
bs = BeamSplitterSpec(0.521)
cov = propagate(optimized_direction_map(bs, th), input_covariance(A, B))
k = opt_combo(th, bs.gamma)
best = optimize_gain(cov, k)
g_cf = closed_form_gain(bs.t, bs.r, (A.v_sq + B.v_sq) / 2, (A.v_asq + B.v_asq) / 2)
print(f"gamma = {np.degrees(bs.gamma):.3f} deg")
print(f"optimum gain {best.g_opt:.6f} (cancelling gain {cancelling_gain(bs.t):.6f}) -> {best.v_min:.6f}")
print(f"closed-form gain {g_cf:.6f} -> {combo_value(cov, k, g_cf):.6f}")

print("\nmisset [deg]   k pair   l pair   product root")
for deg in (0.0, 0.5, 1.0, 1.35, 1.5):
    imp = DetectionImperfections(angle_error_c=np.radians(deg), angle_error_d=np.radians(deg))
    noisy = apply_detection(cov, imp)
    vk = optimize_gain(noisy, k).v_min
    vl = optimize_gain(noisy, opt_conjugate_combo(th, bs.gamma)).v_min
    print(f"{deg:10.2f}     {vk:.4f}   {vl:.4f}   {np.sqrt(vk * vl):.4f}")

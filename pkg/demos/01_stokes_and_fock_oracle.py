"""Stokes operators on a truncated two-mode Fock space.

The SU(2) algebra holds on every state that cannot feel the cutoff. A
circularly polarised coherent state then sits exactly at shot noise in
every dark-plane direction.
"""

import numpy as np

from polent.fock import TruncatedTwoModeSpace, coherent_dark_plane_variance, commutator_residual

for n_max in (3, 8):
    space = TruncatedTwoModeSpace(n_max)
    worst = max(commutator_residual(space, *p) for p in ((1, 2, 3), (2, 3, 1), (3, 1, 2)))
    print(f"n_max={n_max}: largest commutator residual {worst:.1e}")

space = TruncatedTwoModeSpace(16)
for deg in (0, 30, 45, 90):
    chk = coherent_dark_plane_variance(np.sqrt(2.0), np.radians(deg), space)
    print(f"S({deg:>2} deg): variance {chk.variance:.6f}, |<S3>| {abs(chk.s3_mean):.6f}, ratio {chk.ratio:.8f}")

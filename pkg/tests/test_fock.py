import numpy as np
import pytest

from polent.errors import InvalidArgumentError, TruncationError
from polent.fock import (TruncatedTwoModeSpace, build_stokes_matrices, circular_coherent_state,
                         coherent_dark_plane_variance, commutator_residual, normalized_coherent_variance)
from polent.errors import DegenerateNormalizationError


def test_vacuum_expectations():
    space = TruncatedTwoModeSpace(1)
    stokes = build_stokes_matrices(space)
    vac = space.fock_state(0, 0)
    assert all(stokes[k].expectation(vac) == 0 for k in stokes)


@pytest.mark.parametrize("n_max", [1, 4])
def test_single_x_photon(n_max):
    space = TruncatedTwoModeSpace(n_max)
    stokes = build_stokes_matrices(space)
    psi = space.fock_state(1, 0)
    assert [stokes[f"S{k}"].expectation(psi) for k in range(4)] == [1, 1, 0, 0]


def test_circular_coherent_state_means():
    alpha = 0.8
    space = TruncatedTwoModeSpace(12)
    stokes = build_stokes_matrices(space)
    psi = circular_coherent_state(alpha, space)
    # expectation values on the truncated vector, carrier entirely in S3
    assert stokes["S3"].expectation(psi) == pytest.approx(alpha ** 2, abs=1e-10)
    assert stokes["S1"].expectation(psi) == pytest.approx(0.0, abs=1e-12)
    assert stokes["S2"].expectation(psi) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n_max", [1, 3, 8])
def test_hermitian(n_max):
    stokes = build_stokes_matrices(TruncatedTwoModeSpace(n_max))
    assert max(s.hermiticity_error() for s in stokes.values()) <= 1e-12


@pytest.mark.parametrize("n_max", [3, 8])
@pytest.mark.parametrize("klm", [(1, 2, 3), (2, 3, 1), (3, 1, 2), (2, 1, 3)])
def test_su2_commutators(n_max, klm):
    assert commutator_residual(TruncatedTwoModeSpace(n_max), *klm) <= 1e-12


@pytest.mark.parametrize("k", [1, 2, 3])
def test_s0_commutes(k):
    assert commutator_residual(TruncatedTwoModeSpace(3), 0, k) <= 1e-12


def test_bad_index_triple():
    with pytest.raises(InvalidArgumentError):
        commutator_residual(TruncatedTwoModeSpace(3), 1, 1, 2)


@pytest.mark.parametrize("n_max", [0, 33])
def test_space_limits(n_max):
    with pytest.raises(InvalidArgumentError):
        TruncatedTwoModeSpace(n_max)


@pytest.mark.parametrize("theta", [0.0, np.pi / 4, np.pi / 2])
def test_coherent_variance_is_shot_noise(theta):
    chk = coherent_dark_plane_variance(np.sqrt(2.0), theta, TruncatedTwoModeSpace(16))
    assert chk.s3_mean == pytest.approx(2.0, rel=1e-9)
    assert chk.ratio == pytest.approx(1.0, abs=0.01)


def test_coherent_uncertainty_saturated():
    space = TruncatedTwoModeSpace(16)
    v1 = coherent_dark_plane_variance(np.sqrt(2.0), 0.3, space)
    v2 = coherent_dark_plane_variance(np.sqrt(2.0), 0.3 + np.pi / 2, space)
    assert v1.variance * v2.variance >= v1.s3_mean ** 2 * (1 - 0.02)


def test_vacuum_has_no_shot_reference():
    chk = coherent_dark_plane_variance(0.0, 0.0, TruncatedTwoModeSpace(4))
    assert chk.degenerate and chk.ratio is None and chk.variance == 0.0
    with pytest.raises(DegenerateNormalizationError):
        normalized_coherent_variance(0.0, 0.0, TruncatedTwoModeSpace(4))


def test_truncation_convergence():
    # |alpha|^2 = 2 is refused at n_max = 8 (tail 1.1e-6 per mode), so converge at 1.5
    errs = [abs(normalized_coherent_variance(np.sqrt(1.5), 0.0, TruncatedTwoModeSpace(n)) - 1)
            for n in (8, 12, 16)]
    assert errs[0] > 0
    assert errs[0] >= errs[1] - 1e-13 and errs[1] >= errs[2] - 1e-13


def test_tail_guard_at_low_cutoff():
    with pytest.raises(TruncationError):
        coherent_dark_plane_variance(np.sqrt(2.0), 0.0, TruncatedTwoModeSpace(8))


def test_truncation_refused():
    with pytest.raises(TruncationError):
        coherent_dark_plane_variance(2.0, 0.0, TruncatedTwoModeSpace(8))  # |alpha|^2 = 4 > n_max/4
    with pytest.raises(TruncationError):
        circular_coherent_state(np.sqrt(12.0), TruncatedTwoModeSpace(8))  # Poisson(6) tail above 8

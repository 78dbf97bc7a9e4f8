import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from conftest import PARAMS
from rrshift import (
    AmplitudeForm,
    CutoffCoverageError,
    CutoffFunction,
    SmoothStepProfile,
    XiFrame,
    emission_amplitude,
    emitted_energy_larmor,
    energy_spectral,
    energy_time_domain,
    ramp_artifact,
    spectrum_grid,
    xi_derivatives,
)
from rrshift.emission import acceleration_transform, ramp_transform


@pytest.fixture(scope="module")
def cutoff(static_traj):
    return CutoffFunction.covering(static_traj)


def test_cutoff_shape(cutoff):
    xi = np.linspace(cutoff.xi_a, cutoff.xi_b, 11)
    np.testing.assert_array_equal(cutoff(xi), 1.0)
    lo, hi = cutoff.window
    np.testing.assert_array_equal(cutoff(np.array([lo - 1.0, lo, hi, hi + 1.0])), 0.0)
    assert cutoff.width == pytest.approx(2.0 * cutoff.plateau_length)


@settings(max_examples=15)
@given(st.floats(0.5, 50.0))
def test_cutoff_slope_energy_law(width):
    chi = CutoffFunction(-1.0, 2.0, width)
    a, b = chi.window
    ref = sum(integrate.quad(lambda x: float(chi.derivative(x)) ** 2, lo, hi, epsabs=1e-14)[0]
              for lo, hi in ((a, -1.0), (2.0, b)))
    assert chi.slope_energy == pytest.approx(ref, rel=1e-10)
    assert chi.slope_energy == pytest.approx(2 * (700 / 429) / width, rel=1e-13)


def test_cutoff_validation():
    with pytest.raises(ValueError):
        CutoffFunction(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        CutoffFunction(0.0, 1.0, 0.0)


@pytest.mark.parametrize("cos_theta", [-1.0, -0.3, 0.0, 0.8, 1.0])
def test_covering_cutoff_holds_every_angle(static_traj, cutoff, cos_theta):
    cutoff.check_covers(static_traj, cos_theta)


def test_narrow_cutoff_is_rejected(static_traj):
    t_lo, t_hi = static_traj.support
    narrow = CutoffFunction(t_lo + 0.1, t_hi, 1.0)
    with pytest.raises(CutoffCoverageError):
        emission_amplitude(static_traj, 1.0, 0.5, narrow)


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.99, 0.99), st.floats(-6.0, 1.0))
def test_xi_frame_inverse(cos_theta, t):
    frame = XiFrame(_cached_static(), cos_theta=cos_theta)
    back = frame.t_of_xi(np.array([frame.xi(t)]))[0]
    assert back == pytest.approx(t, abs=1e-12)


_CACHE = {}


def _cached_static():
    if "traj" not in _CACHE:
        from conftest import STATIC
        from rrshift import integrate_trajectory
        _CACHE["traj"] = integrate_trajectory(PARAMS, STATIC, 1.5)
    return _CACHE["traj"]


def test_xi_frame_needs_one_angle(static_traj):
    with pytest.raises(ValueError):
        XiFrame(static_traj)
    with pytest.raises(ValueError):
        XiFrame(static_traj, theta=0.1, cos_theta=0.5)


def test_xi_derivatives_broadside(static_traj):
    t = np.linspace(*static_traj.support, 9)
    d2z, d2t, dtau = xi_derivatives(static_traj, np.pi / 2, t)
    s = static_traj.state(t)
    np.testing.assert_allclose(d2z, s.zddot, atol=1e-15)
    np.testing.assert_allclose(d2t, 0.0, atol=1e-15)
    np.testing.assert_allclose(dtau, 1.0 / s.gamma)


@pytest.mark.parametrize("theta", [0.3, 1.2, 2.5])
def test_xi_derivatives_match_finite_difference(static_traj, theta):
    c = np.cos(theta)
    frame = XiFrame(static_traj, cos_theta=c)
    t0 = -2.0
    xi0 = frame.xi(t0)
    h = 1e-4
    z = static_traj.state(frame.t_of_xi(np.array([xi0 - h, xi0, xi0 + h]))).z
    fd = (z[0] - 2 * z[1] + z[2]) / h**2
    d2z, d2t, dtau = xi_derivatives(static_traj, theta, np.array([t0]))
    assert d2z[0] == pytest.approx(fd, rel=1e-5)
    # normalization: (dt/dxi)^2 - (dz/dxi)^2 = (dtau/dxi)^2
    s = static_traj.state(t0)
    D = 1.0 - s.zdot * c
    assert (1 / D) ** 2 - (s.zdot / D) ** 2 == pytest.approx(dtau[0] ** 2, rel=1e-13)


@pytest.mark.parametrize("kappa", [0.0, 3.0, 19.9, 20.1, 75.0, -40.0])
def test_ramp_transform_matches_quadrature(kappa):
    prof = SmoothStepProfile(7)
    re = integrate.quad(lambda u: float(prof(u, 1)) * np.cos(kappa * u), 0, 1, epsabs=1e-14, limit=200)[0]
    im = integrate.quad(lambda u: float(prof(u, 1)) * np.sin(kappa * u), 0, 1, epsabs=1e-14, limit=200)[0]
    assert ramp_transform(prof, kappa) == pytest.approx(re + 1j * im, abs=1e-12)


def test_acceleration_transform_zero_frequency(static_traj):
    # int d2z/dxi2 dxi = jump of dz/dxi across the support
    c = 0.4
    jump = static_traj.v0 / (1 - static_traj.v0 * c) - static_traj.v_in / (1 - static_traj.v_in * c)
    assert acceleration_transform(static_traj, 0.0, c) == pytest.approx(jump, rel=1e-12)


def test_acceleration_transform_branches_agree(static_traj):
    k = np.array([20.0, 40.0])
    gauss = acceleration_transform(static_traj, k, -0.5, threshold=1e4)
    filon = acceleration_transform(static_traj, k, -0.5, threshold=0.0, n_filon=1024)
    assert np.max(np.abs(filon - gauss)) <= 1e-8 * np.max(np.abs(gauss))


def test_acceleration_transform_decays(static_traj):
    vals = np.abs(acceleration_transform(static_traj, np.array([1e2, 1e3, 1e4]), 0.3))
    assert np.log10(vals[0] / vals[1]) > 3.5
    assert np.log10(vals[1] / vals[2]) > 3.0


@pytest.mark.parametrize("fixture", ["static_traj", "time_traj"])
@pytest.mark.parametrize("k,theta", [(0.3, 0.2), (2.0, 1.0), (5.0, 2.0), (4.0, 2.9)])
def test_velocity_and_ibp_forms_agree(request, fixture, k, theta):
    traj = request.getfixturevalue(fixture)
    cut = CutoffFunction.covering(traj)
    a = np.array(emission_amplitude(traj, k, theta, cut, AmplitudeForm.VELOCITY))
    b = np.array(emission_amplitude(traj, k, theta, cut, AmplitudeForm.IBP))
    assert np.max(np.abs(a - b)) <= 1e-8 * np.max(np.abs(b))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 100.0), st.floats(0.0, np.pi))
def test_negative_frequency_is_conjugate(k, theta):
    traj = _cached_static()
    cut = CutoffFunction.covering(traj)
    pos = emission_amplitude(traj, k, theta, cut)
    neg = emission_amplitude(traj, -k, theta, cut)
    for p, n in zip(pos, neg):
        assert abs(n - np.conj(p)) <= 1e-12 * abs(p)


def test_velocity_form_error_floor_is_absolute(static_traj, cutoff):
    # Far out in the tail both forms stay within round-off of each other in
    # absolute terms, even where the amplitude itself is tiny.
    a = np.array(emission_amplitude(static_traj, 40.0, 2.9, cutoff, "velocity"))
    b = np.array(emission_amplitude(static_traj, 40.0, 2.9, cutoff, "ibp"))
    peak = np.linalg.norm(emission_amplitude(static_traj, 0.1, 2.9, cutoff))
    assert np.linalg.norm(a - b) <= 1e-12 * peak


def test_ibp_form_rejects_zero_frequency(static_traj, cutoff):
    with pytest.raises(ValueError):
        emission_amplitude(static_traj, 0.0, 0.4, cutoff)


def test_time_domain_energy_is_larmor(static_traj, time_traj):
    for traj in (static_traj, time_traj):
        E = emitted_energy_larmor(traj)
        assert energy_time_domain(traj) == pytest.approx(E, rel=1e-10)


def test_artifact_scales_inversely_with_width(static_traj, cutoff):
    a = ramp_artifact(static_traj, cutoff)
    b = ramp_artifact(static_traj, cutoff.with_width(2 * cutoff.width))
    assert b == pytest.approx(a / 2, rel=1e-14)
    assert a < 0.0


def test_free_particle_radiates_only_the_artifact(free_traj):
    r = energy_spectral(free_traj, CutoffFunction.covering(free_traj), n_angles=16)
    assert abs(r.energy) <= 1e-10 * abs(r.artifact)


def test_spectral_energy_independent_of_ramp_profile(static_traj):
    e7 = energy_spectral(static_traj, CutoffFunction.covering(static_traj), n_angles=32)
    e9 = energy_spectral(static_traj, CutoffFunction.covering(static_traj, profile=SmoothStepProfile(9)),
                         n_angles=32)
    assert e9.artifact != pytest.approx(e7.artifact, rel=1e-3)
    assert e9.energy == pytest.approx(e7.energy, rel=1e-10)
    assert e7.energy == pytest.approx(emitted_energy_larmor(static_traj), rel=1e-6)


def test_spectrum_grid_csv(tmp_path, static_traj, cutoff):
    grid = spectrum_grid(static_traj, cutoff, np.array([0.5, 1.0, 4.0]), n_angles=4)
    assert grid.A_t.shape == (4, 3) and grid.density.shape == (4, 3)
    path = tmp_path / "spec.csv"
    grid.to_csv(path)
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 12
    assert list(rows[0]) == ["k", "cos_theta", "re_A_t", "im_A_t", "re_A_z", "im_A_z", "dE_dk_dcos"]
    first = complex(float(rows[0]["re_A_t"]), float(rows[0]["im_A_t"]))
    assert first == grid.A_t[0, 0]
    with pytest.raises(ValueError):
        spectrum_grid(static_traj, cutoff, np.array([1.0, 0.5]))

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import romb

from spmsm_diag.errors import InvalidFaultError, RotorContactError
from spmsm_diag.fault_model import (DynamicEcc, Healthy, MixedEcc, PartialDemagArc,
                                    PartialDemagAsymmetric, PartialDemagUniform, PMFieldModel,
                                    StaticEcc, UniformDemag, airgap_width, fault_frequency_pattern,
                                    fault_from_dict, fault_to_dict, mixed_ecc_ratio,
                                    pm_flux_density, pm_fourier_coefficient)
from spmsm_diag.motor_core import MotorSpec

M = MotorSpec()
MODEL = PMFieldModel.from_motor(M)
ratios = st.floats(0.0, 0.95)
PD_FAULTS = [PartialDemagUniform(0.25), PartialDemagAsymmetric(0.25), PartialDemagArc(0.25)]


def romberg_sine_coefficient(model, n, k=13):
    """Coefficient of sin(n p theta) by Romberg-extrapolated trapezoid per magnet."""
    p = model.pole_pairs
    total = 0.0
    for s0, s1, v0, v1 in model.segments():
        x = np.linspace(s0, s1, 2 ** k + 1)
        b = v0 + (v1 - v0) * (x - s0) / (s1 - s0)
        total += romb(b * np.sin(n * p * x), dx=x[1] - x[0])
    return total / math.pi


# -- fault descriptions -----------------------------------------------------

@pytest.mark.parametrize("fault", [Healthy(), StaticEcc(0.4), DynamicEcc(0.3), MixedEcc(0.4, 0.4),
                                   UniformDemag(0.5)] + PD_FAULTS)
def test_fault_dict_round_trip(fault):
    assert fault_from_dict(fault_to_dict(fault)) == fault


@pytest.mark.parametrize("bad", [
    {"fault": "SE", "delta_s": 1.2},
    {"fault": "DE", "delta_d": -0.1},
    {"fault": "UD", "severity": 1.5},
    {"fault": "PD_Arpmaa", "arc_fraction": 0.0},
    {"fault": "PD_urBpm", "severity": 0.5, "pole_index": -1},
    {"fault": "SE", "delta_d": 0.2},
    {"fault": "spin"},
])
def test_invalid_faults_rejected(bad):
    with pytest.raises(InvalidFaultError):
        fault_from_dict(bad)


def test_out_of_range_ratio_message_names_bound():
    with pytest.raises(InvalidFaultError, match=r"\[0, 1\)"):
        StaticEcc(1.2)


# -- airgap ------------------------------------------------------------------

def test_healthy_gap_is_table_airgap():
    theta = np.linspace(0, 2 * np.pi, 17)
    assert np.all(airgap_width(Healthy(), theta, 0.01, M) == 0.002)


@pytest.mark.parametrize("theta, expected", [(0.0, 0.0012), (math.pi, 0.0028),
                                             (math.pi / 2, 0.0020)])
def test_static_gap_values(theta, expected):
    assert airgap_width(StaticEcc(0.4), theta, 0.0, M) == pytest.approx(expected, abs=1e-15)


def test_dynamic_gap_period_is_one_revolution():
    period = M.pole_pairs / M.supply_frequency
    assert period == pytest.approx(21.24e-3, abs=5e-6)
    t = np.linspace(0, period, 50)
    a = airgap_width(DynamicEcc(0.4), 0.7, t, M)
    b = airgap_width(DynamicEcc(0.4), 0.7, t + period, M)
    np.testing.assert_allclose(a, b, rtol=1e-12)
    assert np.ptp(a) > 0.001


@pytest.mark.parametrize("fault", [StaticEcc(0.0), DynamicEcc(0.0), MixedEcc(0.0, 0.0)])
def test_zero_eccentricity_is_uniform(fault):
    theta = np.linspace(0, 2 * np.pi, 33)[:, None]
    t = np.linspace(0, 0.02, 7)[None, :]
    np.testing.assert_allclose(airgap_width(fault, theta, t, M), M.airgap, rtol=1e-12)


@given(ds=ratios)
def test_static_gap_mean_is_airgap(ds):
    theta = np.arange(1024) * 2 * np.pi / 1024
    assert np.mean(airgap_width(StaticEcc(ds), theta, 0.0, M)) == pytest.approx(M.airgap,
                                                                                 rel=1e-12)


def test_mixed_gap_reduces_to_static_and_dynamic():
    theta = np.linspace(0, 2 * np.pi, 25)[:, None]
    t = np.linspace(0, 0.02, 5)[None, :]
    # the exact eccentric-circle gap differs from the linear form by at most
    # the sagitta e^2 / (R_r + sqrt(R_r^2 - e^2)) of the offset e = delta g
    e = 0.3 * M.airgap
    r_r = M.stator_radius - M.airgap
    sagitta = e ** 2 / (r_r + math.sqrt(r_r ** 2 - e ** 2))
    me_s = airgap_width(MixedEcc(0.3, 0.0), theta, t, M)
    lin_s = airgap_width(StaticEcc(0.3), theta, t, M)
    assert np.max(np.abs(me_s - lin_s)) <= sagitta * (1 + 1e-6)
    me_d = airgap_width(MixedEcc(0.0, 0.3), theta, t, M)
    lin_d = airgap_width(DynamicEcc(0.3), theta, t, M)
    assert np.max(np.abs(me_d - lin_d)) <= sagitta * (1 + 1e-6)


def test_rotor_contact_detected():
    theta = np.linspace(0, 2 * np.pi, 361)[:, None]
    t = np.linspace(0, 0.02124, 64)[None, :]
    with pytest.raises(RotorContactError):
        airgap_width(MixedEcc(0.6, 0.5), theta, t, M)


# -- mixed ratio ---------------------------------------------------------------

def test_mixed_ratio_examples():
    assert mixed_ecc_ratio(0.4, 0.4, 0.0) == pytest.approx(0.8, abs=1e-15)
    assert mixed_ecc_ratio(0.4, 0.4, math.pi) == pytest.approx(0.0, abs=1e-7)


@given(ds=ratios, theta=st.floats(-10, 10))
def test_mixed_ratio_without_dynamic_part_is_static(ds, theta):
    assert mixed_ecc_ratio(ds, 0.0, theta) == pytest.approx(ds, abs=1e-15)


@given(ds=ratios, dd=ratios, theta=st.floats(-10, 10))
def test_mixed_ratio_bounds(ds, dd, theta):
    v = mixed_ecc_ratio(ds, dd, theta)
    assert abs(ds - dd) - 1e-7 <= v <= ds + dd + 1e-12


# -- PM field --------------------------------------------------------------------

def test_even_harmonics_are_zero():
    for n in (2, 4, 10, 24):
        assert pm_fourier_coefficient(n, MODEL) == 0.0


def test_full_pitch_fundamental():
    full = PMFieldModel(b_pm=0.9, pole_pairs=4, arc=math.pi / 4)
    assert pm_fourier_coefficient(1, full) == pytest.approx(4 * 0.9 / math.pi, rel=1e-15)


@pytest.mark.parametrize("n", range(1, 26, 2))
def test_fourier_coefficient_matches_numeric_integration(n):
    closed = pm_fourier_coefficient(n, MODEL)
    numeric = romberg_sine_coefficient(MODEL, n)
    scale = max(abs(closed), 4 * MODEL.b_pm / (math.pi * n))
    assert abs(closed - numeric) / scale <= 1e-9


def test_closed_form_needs_symmetric_pattern():
    with pytest.raises(InvalidFaultError):
        pm_fourier_coefficient(1, MODEL.with_fault(PD_FAULTS[0]))


@given(theta=st.floats(0, 2 * math.pi))
def test_full_strength_uniform_demag_is_healthy(theta):
    assert pm_flux_density(UniformDemag(1.0), MODEL, theta) == pm_flux_density(Healthy(), MODEL,
                                                                                theta)


@given(m=st.floats(0, 1))
def test_uniform_demag_scales_pointwise(m):
    theta = np.linspace(0, 2 * np.pi, 997)
    np.testing.assert_allclose(pm_flux_density(UniformDemag(m), MODEL, theta),
                               m * pm_flux_density(Healthy(), MODEL, theta), rtol=1e-15,
                               atol=0)


def test_quarter_strength_uniform_demag():
    theta = np.linspace(0, 2 * np.pi, 4001)
    np.testing.assert_array_equal(pm_flux_density(UniformDemag(0.25), MODEL, theta),
                                  0.25 * pm_flux_density(Healthy(), MODEL, theta))


def test_single_pole_demag_only_touches_that_pole():
    theta = np.linspace(0, 2 * np.pi, 8001, endpoint=False)
    healthy = pm_flux_density(Healthy(), MODEL, theta)
    faulty = pm_flux_density(PartialDemagUniform(0.25, 0), MODEL, theta)
    pole0 = theta < math.pi / 4
    np.testing.assert_allclose(faulty[pole0], 0.25 * healthy[pole0], rtol=1e-15)
    np.testing.assert_array_equal(faulty[~pole0], healthy[~pole0])


@pytest.mark.parametrize("fault", PD_FAULTS)
def test_partial_demag_creates_fractional_orders(fault):
    n = 2 ** 16
    theta = np.arange(n) * 2 * np.pi / n
    coeffs = np.abs(np.fft.rfft(pm_flux_density(fault, MODEL, theta))) * 2 / n
    p = M.pole_pairs
    fractional = [coeffs[k] for k in range(1, 40) if k % p]
    assert max(fractional) > 1e-3
    healthy = np.abs(np.fft.rfft(pm_flux_density(Healthy(), MODEL, theta))) * 2 / n
    assert max(healthy[k] for k in range(1, 40) if k % p) < 1e-12


@given(theta=st.floats(0, 2 * math.pi))
def test_healthy_field_half_cycle_antisymmetry(theta):
    shift = math.pi / M.pole_pairs
    a = pm_flux_density(Healthy(), MODEL, theta)
    b = pm_flux_density(Healthy(), MODEL, theta + shift)
    # exactly on a magnet edge either side may be sampled first
    assert b == pytest.approx(-a, abs=1e-12) or abs(abs(a) - MODEL.b_pm) < 1e-12 or a == 0


@pytest.mark.parametrize("fault", PD_FAULTS)
def test_partial_demag_breaks_antisymmetry(fault):
    theta = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    a = pm_flux_density(fault, MODEL, theta)
    b = pm_flux_density(fault, MODEL, theta + math.pi / M.pole_pairs)
    assert np.max(np.abs(a + b)) > 1e-6


def test_pole_index_out_of_range():
    with pytest.raises(InvalidFaultError):
        pm_flux_density(PartialDemagUniform(0.5, 8), MODEL, 0.0)


def test_arc_cut_from_one_edge_only():
    cut = MODEL.with_fault(PartialDemagArc(0.25)).segments()[0]
    full = MODEL.segments()[0]
    assert cut[0] == full[0]
    assert cut[1] - cut[0] == pytest.approx(0.25 * (full[1] - full[0]))


# -- frequency patterns --------------------------------------------------------

TABLE_FREQS = (47.075, 141.225, 235.375, 329.525, 423.675, 517.825)


def test_eccentricity_pattern_matches_table_columns():
    pat = fault_frequency_pattern("eccentricity", 188.3, 4, 4)
    assert pat.frequencies == pytest.approx(TABLE_FREQS, abs=1e-9)


def test_three_orders_miss_the_last_column():
    pat = fault_frequency_pattern("eccentricity", 188.3, 4, 3)
    assert len(pat.frequencies) == 5 and 517.825 not in pat.frequencies


def test_healthy_pattern_is_odd_harmonics():
    pat = fault_frequency_pattern("healthy", 188.3, 4, 3)
    assert pat.frequencies == pytest.approx((188.3, 564.9, 941.5), abs=1e-9)


def test_single_pole_pair_drops_zero():
    pat = fault_frequency_pattern("eccentricity", 188.3, 1, 1)
    assert pat.frequencies == pytest.approx((2 * 188.3,))


@given(fs=st.floats(1, 1000), p=st.integers(1, 12), k=st.integers(1, 8))
def test_pattern_properties(fs, p, k):
    ecc = fault_frequency_pattern("eccentricity", fs, p, k)
    pd = fault_frequency_pattern("partial_demag", fs, p, k)
    assert ecc.frequencies == pd.frequencies
    f = np.array(ecc.frequencies)
    assert np.all(f > 0) and np.all(np.diff(f) > 0)
    orders = f / (fs / p)
    np.testing.assert_allclose(orders, np.round(orders), atol=1e-6)

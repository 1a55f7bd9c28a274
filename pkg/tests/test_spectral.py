import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spmsm_diag.errors import InconsistentScenariosError, InvalidInputError, OutOfBandError
from spmsm_diag.fault_model import FrequencyPattern, fault_frequency_pattern, sideband_pattern
from spmsm_diag.motor_core import MotorSpec
from spmsm_diag.spectral import (FLOOR_DB, HarmonicTable, asbc, harmonic_table, spectral_energy,
                                 spectrum)
from spmsm_diag.synthesis import SimConfig, Waveform

F_MECH = 188.3 / 4
N = SimConfig().total_samples
RATE = SimConfig().samples_per_mechanical_period * F_MECH
T = np.arange(N) / RATE
PATTERN = sideband_pattern(MotorSpec())
FAULTED = ["SE", "DE", "ME", "PD_urBpm", "PD_ArBpm", "PD_Arpmaa"]


def tone(*parts):
    x = np.zeros(N)
    for amp, freq in parts:
        x += amp * np.cos(2 * np.pi * freq * T)
    return Waveform(x, RATE)


def test_resolution_and_bins():
    s = spectrum(tone((1.0, 188.3)))
    assert s.resolution == pytest.approx(F_MECH / 8, rel=1e-15)
    assert s.resolution / 2 == pytest.approx(2.942, abs=1e-3)
    np.testing.assert_array_equal(s.bin_frequencies, np.arange(N // 2 + 1) * s.resolution)


def test_single_on_bin_cosine():
    s = spectrum(tone((697.0, 188.3)))
    k = int(round(188.3 / s.resolution))
    assert s.amplitudes_db[k] == pytest.approx(20 * math.log10(697), abs=1e-9)
    assert 20 * math.log10(697) == pytest.approx(56.87, abs=0.01)
    # everything else is double-precision FFT round-off of a 697 V line
    roundoff = 697.0 * np.finfo(float).eps * math.sqrt(N)
    others = np.delete(s.amplitudes, k)
    assert np.all(others <= roundoff)
    assert np.median(np.delete(s.amplitudes_db, k)) == FLOOR_DB


def test_zero_waveform_sits_on_floor():
    s = spectrum(Waveform(np.zeros(N), RATE))
    assert np.all(s.amplitudes_db == -240.0)


def test_non_power_of_two_rejected():
    with pytest.raises(InvalidInputError):
        spectrum(Waveform(np.zeros(3000), RATE))


@given(seed=st.integers(0, 2 ** 32 - 1), n=st.sampled_from([64, 1024, 8192]))
def test_parseval(seed, n):
    x = np.random.default_rng(seed).normal(size=n)
    s = spectrum(Waveform(x, 1000.0))
    assert spectral_energy(s, n) == pytest.approx(float(np.sum(x ** 2)), rel=1e-9)


def test_two_tone_asbc():
    s = spectrum(tone((10.0, 47.075), (1.0, 141.225)))
    pat = FrequencyPattern("eccentricity", (47.075, 141.225), 1)
    vec = asbc(s, pat)
    assert vec.values == pytest.approx([20.0, 0.0], abs=0.01)


def test_pattern_lands_on_exact_bins():
    vec = asbc(spectrum(tone((1.0, 188.3))), PATTERN)
    assert vec.frequencies == pytest.approx((47.075, 141.225, 235.375, 329.525, 423.675,
                                             517.825), abs=1e-9)
    for e in vec.entries:
        assert e.matched_hz == pytest.approx(e.target_hz, abs=1e-9)


@given(p=st.integers(1, 8), k=st.integers(1, 40))
def test_fault_orders_are_whole_bins(p, k):
    # every multiple of the rotor frequency is a whole number of bins
    res = F_MECH / 8
    assert (k * F_MECH) / res == pytest.approx(8 * k, abs=1e-9)


def test_empty_pattern():
    assert len(asbc(spectrum(tone((1.0, 188.3))), FrequencyPattern("eccentricity", (), 1))) == 0


def test_out_of_band_names_frequency():
    s = spectrum(Waveform(np.zeros(1024), 1000.0))
    with pytest.raises(OutOfBandError, match="600"):
        asbc(s, FrequencyPattern("healthy", (100.0, 600.0), 1))


@given(c=st.floats(1e-3, 1e3))
def test_scale_covariance(c):
    w = tone((697.0, 188.3), (3.0, 47.075), (0.5, 517.825))
    a = asbc(spectrum(w), PATTERN).values
    b = asbc(spectrum(w.scaled(c)), PATTERN).values
    live = a > FLOOR_DB + 100
    np.testing.assert_allclose(b[live] - a[live], 20 * math.log10(c), atol=1e-9)


def test_harmonic_table_shapes_and_order():
    rows = [(name, spectrum(tone((1.0 + i, 188.3), (0.1, 47.075))))
            for i, name in enumerate(["healthy", "SE", "DE"])]
    one = harmonic_table(rows[:1], PATTERN)
    assert len(one.rows) == 1 and len(one.columns) == 6
    table = harmonic_table(rows, PATTERN)
    assert table.labels == ("healthy", "SE", "DE")
    back = HarmonicTable.from_csv(table.to_csv())
    assert back.labels == table.labels
    for (_, a), (_, b) in zip(back.rows, table.rows):
        np.testing.assert_array_equal(a.values, b.values)


def test_harmonic_table_rejects_mixed_resolution():
    a = spectrum(Waveform(np.zeros(1024), 1000.0))
    b = spectrum(Waveform(np.zeros(2048), 1000.0))
    with pytest.raises(InconsistentScenariosError):
        harmonic_table([("a", a), ("b", b)], FrequencyPattern("healthy", (100.0,), 1))


def test_harmonic_table_needs_a_row():
    with pytest.raises(InvalidInputError):
        harmonic_table([], PATTERN)


# -- spectra of synthesized scenarios -------------------------------------------------

def _odd_supply_bins(s, f_s=188.3):
    k = np.arange(len(s.amplitudes))
    per = int(round(f_s / s.resolution))
    return (k % per == 0) & ((k // per) % 2 == 1)


def test_healthy_energy_only_at_odd_supply_harmonics(matrix_sets):
    s = spectrum(matrix_sets["healthy"].diagnostic_emf)
    odd = _odd_supply_bins(s)
    assert np.sum(s.amplitudes[~odd] ** 2) / np.sum(s.amplitudes ** 2) < 1e-20
    fund = s.amplitudes_db[int(round(188.3 / s.resolution))]
    assert np.all(asbc(s, PATTERN).values <= fund - 60)


def test_uniform_demag_support_matches_healthy(matrix_sets):
    h = spectrum(matrix_sets["healthy"].diagnostic_emf)
    u = spectrum(matrix_sets["UD"].diagnostic_emf)
    live = h.amplitudes > 1e-6
    np.testing.assert_array_equal(live, u.amplitudes > 1e-6 * 0.25)
    np.testing.assert_allclose(u.amplitudes_db[live] - h.amplitudes_db[live],
                               20 * math.log10(0.25), atol=1e-9)


@pytest.mark.parametrize("name", FAULTED)
def test_fault_raises_some_sideband(matrix_sets, name):
    h = asbc(spectrum(matrix_sets["healthy"].diagnostic_emf), PATTERN).values
    f = asbc(spectrum(matrix_sets[name].diagnostic_emf), PATTERN).values
    assert np.max(f - h) >= 10.0


def test_pattern_columns_match_healthy_pattern_bins():
    # the odd supply harmonics are also whole bins
    s = spectrum(tone((1.0, 188.3)))
    for f in fault_frequency_pattern("healthy", 188.3, 4, 5).frequencies:
        assert (f / s.resolution) == pytest.approx(round(f / s.resolution), abs=1e-9)


def test_spectrum_csv_header():
    text = spectrum(Waveform(np.zeros(8), 8.0)).to_csv()
    assert text.splitlines()[0] == "freq_hz,amplitude_db"
    assert len(text.splitlines()) == 6

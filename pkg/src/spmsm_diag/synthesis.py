"""Time-domain waveform synthesis for the SPMSM.

The airgap field is the rotor's rectangular PM pattern multiplied by a gap
permeance that follows the eccentric airgap. Coil flux is the integral of that
field over each main tooth; phase flux, back-EMF, ideal-source currents and
electromagnetic torque follow from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInputError, InvalidSpecError, RotorContactError, UndefinedRippleError
from .fault_model import (FaultSpec, Healthy, PMFieldModel, airgap_width, demag_part,
                          eccentricity_part)
from .motor_core import MotorSpec

PERMEANCE_MODELS = ("magnetic", "geometric")
PHASES = ("a", "b", "c")

# Calibration targets for the healthy default motor.
TARGET_FLUX_PEAK = 0.00589
TARGET_EMF_PEAK = 697.0


@dataclass(frozen=True)
class SimConfig:
    """Sampling and numerical settings for one synthesis run.

    ``diagnostic_coil`` selects the single tooth coil whose EMF feeds the
    spectral analysis. ``permeance_model`` is ``"magnetic"`` (airgap plus
    magnet recoil height, the default) or ``"geometric"`` (bare g / gap).
    """

    mechanical_periods: int = 8
    samples_per_mechanical_period: int = 4096
    quadrature_points_per_tooth: int = 64
    current_phase_offset: float = 0.0
    diagnostic_coil: int = 0
    permeance_model: str = "magnetic"

    def __post_init__(self):
        if int(self.mechanical_periods) != self.mechanical_periods or self.mechanical_periods < 1:
            raise InvalidSpecError("mechanical_periods must be an integer >= 1")
        n = self.samples_per_mechanical_period
        if int(n) != n or n < 256 or n & (n - 1):
            raise InvalidSpecError(
                f"samples_per_mechanical_period must be a power of two >= 256, got {n!r}")
        if int(self.quadrature_points_per_tooth) != self.quadrature_points_per_tooth \
                or self.quadrature_points_per_tooth < 2:
            raise InvalidSpecError("quadrature_points_per_tooth must be an integer >= 2")
        if self.permeance_model not in PERMEANCE_MODELS:
            raise InvalidSpecError(
                f"permeance_model must be one of {PERMEANCE_MODELS}, got {self.permeance_model!r}")
        if int(self.diagnostic_coil) != self.diagnostic_coil or self.diagnostic_coil < 0:
            raise InvalidSpecError("diagnostic_coil must be a non-negative integer")

    @property
    def total_samples(self) -> int:
        return self.mechanical_periods * self.samples_per_mechanical_period


@dataclass(frozen=True)
class Waveform:
    samples: np.ndarray
    sample_rate: float
    start_time: float = 0.0
    unit: str = ""

    def __post_init__(self):
        if not self.sample_rate > 0:
            raise InvalidInputError(f"sample_rate must be > 0, got {self.sample_rate!r}")
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 1:
            raise InvalidInputError("waveform samples must be one-dimensional")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self):
        return len(self.samples)

    @property
    def time(self) -> np.ndarray:
        return self.start_time + np.arange(len(self.samples)) / self.sample_rate

    def scaled(self, factor: float) -> Waveform:
        return replace(self, samples=self.samples * factor)


@dataclass(frozen=True)
class WaveformSet:
    """Everything synthesized for one motor and fault.

    ``flux_linkage`` holds the per-turn phase flux (Wb); multiply by the turn
    count for the linkage in Wb-turns. ``coil_flux`` keeps the per-turn flux of
    each main-tooth coil so single-coil signals stay available.
    """

    flux_linkage: tuple
    back_emf: tuple
    current: tuple
    torque: Waveform
    mech_speed: float
    coil_flux: tuple
    turns: float
    diagnostic_coil: int = 0

    @property
    def sample_rate(self) -> float:
        return self.torque.sample_rate

    @property
    def time(self) -> np.ndarray:
        return self.torque.time

    def coil_emf(self, index: int) -> Waveform:
        if not 0 <= index < len(self.coil_flux):
            raise InvalidInputError(f"coil index {index} out of range")
        return back_emf(self.coil_flux[index], self.turns)

    @property
    def diagnostic_emf(self) -> Waveform:
        """EMF of the single coil used for spectral diagnosis."""
        return self.coil_emf(self.diagnostic_coil)

    def columns(self) -> dict:
        """Named sample arrays in CSV column order."""
        out = {"t_s": self.time}
        for label, group in (("flux", self.flux_linkage), ("emf", self.back_emf)):
            unit = "wb" if label == "flux" else "v"
            for ph, w in zip(PHASES, group):
                out[f"{label}_{ph}_{unit}"] = w.samples
        for ph, w in zip(PHASES, self.current):
            out[f"i_{ph}_a"] = w.samples
        out["torque_nm"] = self.torque.samples
        return out


# ---------------------------------------------------------------------------
# Winding layout
# ---------------------------------------------------------------------------


def tooth_angles(motor: MotorSpec) -> np.ndarray:
    n = motor.main_tooth_count
    return np.arange(n) * 2 * math.pi / n


def phase_coils(motor: MotorSpec) -> tuple:
    """Group main-tooth coils into phases a, b, c by electrical position.

    A coil whose electrical angle is ``2*pi/3`` ahead of phase a carries a
    waveform delayed by one third of the period, so it belongs to phase b.
    """
    groups = ([], [], [])
    for i, theta in enumerate(tooth_angles(motor)):
        steps = motor.pole_pairs * theta / (2 * math.pi / 3)
        k = round(steps)
        if abs(steps - k) > 1e-9:
            raise InvalidSpecError(
                f"tooth {i} does not sit on a phase axis for p={motor.pole_pairs}")
        groups[k % 3].append(i)
    if len({len(g) for g in groups}) != 1:
        raise InvalidSpecError(f"unbalanced winding for p={motor.pole_pairs}: {groups}")
    return tuple(tuple(g) for g in groups)


# ---------------------------------------------------------------------------
# Field integration
# ---------------------------------------------------------------------------


def _check_clearance(fault: FaultSpec, motor: MotorSpec, t: np.ndarray):
    """Raise if the rotor touches the stator anywhere during the period."""
    if fault.tag == "healthy":
        return
    theta = np.linspace(0.0, 2 * math.pi, 721)[:, None]
    airgap_width(fault, theta, t[:: max(1, len(t) // 256)][None, :], motor)


def coil_fluxes(motor: MotorSpec, fault: FaultSpec, sim: SimConfig,
                t: np.ndarray) -> np.ndarray:
    """Per-turn flux (Wb) through every main-tooth coil at times ``t``.

    The tooth arc is split at the magnet edges and each smooth piece is
    integrated with Gauss-Legendre nodes, so the discontinuous pole pattern
    introduces no quadrature error.
    """
    ecc = eccentricity_part(fault)
    _check_clearance(ecc, motor, t)
    field = PMFieldModel.from_motor(motor).with_fault(demag_part(fault))
    segs = field.segments()
    two_pi = 2 * math.pi
    segs = segs + [(a + two_pi, b + two_pi, v0, v1) for a, b, v0, v1 in segs]
    nodes, weights = np.polynomial.legendre.leggauss(sim.quadrature_points_per_tooth)

    g = motor.airgap
    recoil = motor.magnet_height / motor.magnet_rel_permeability
    w = motor.principal_tooth_angle
    rotor = motor.mech_speed * t
    out = np.zeros((motor.main_tooth_count, len(t)))
    for i, theta0 in enumerate(tooth_angles(motor)):
        # tooth arc in rotor coordinates, wrapped into [0, 2 pi)
        x0 = np.mod(theta0 - w / 2 - rotor, two_pi)
        x1 = x0 + w
        total = np.zeros(len(t))
        for s0, s1, v0, v1 in segs:
            lo = np.maximum(x0, s0)
            hi = np.minimum(x1, s1)
            mask = hi > lo
            if not mask.any():
                continue
            lo_m, hi_m = lo[mask], hi[mask]
            half = (hi_m - lo_m) / 2
            xs = half[:, None] * nodes + ((hi_m + lo_m) / 2)[:, None]
            b = v0 + (v1 - v0) * (xs - s0) / (s1 - s0)
            if ecc.tag != "healthy":
                stator_theta = xs + rotor[mask][:, None]
                gap = airgap_width(ecc, stator_theta, t[mask][:, None], motor)
                if sim.permeance_model == "magnetic":
                    b = b * (g + recoil) / (gap + recoil)
                else:
                    b = b * g / gap
            total[mask] += half * (b @ weights)
        out[i] = total * motor.stator_radius * motor.core_length
    return out


# ---------------------------------------------------------------------------
# Derived signals
# ---------------------------------------------------------------------------


def back_emf(flux: Waveform, turns: float) -> Waveform:
    """Induced EMF ``-N dphi/dt`` by periodic central differences."""
    if len(flux) < 3:
        raise InvalidInputError("back_emf needs at least 3 samples")
    if not turns >= 1:
        raise InvalidInputError(f"turns must be >= 1, got {turns!r}")
    x = flux.samples
    deriv = (np.roll(x, -1) - np.roll(x, 1)) * (flux.sample_rate / 2)
    return Waveform(-turns * deriv, flux.sample_rate, flux.start_time, "V")


def em_torque(emfs, currents, mech_speed: float) -> Waveform:
    """Electromagnetic torque ``sum(E_i I_i) / Omega`` sample by sample."""
    if not mech_speed > 0:
        raise InvalidInputError(f"mechanical speed must be > 0, got {mech_speed!r}")
    emfs, currents = list(emfs), list(currents)
    if len(emfs) != len(currents) or not emfs:
        raise InvalidInputError("need matching, non-empty EMF and current lists")
    ref = emfs[0]
    for w in emfs + currents:
        if len(w) != len(ref) or w.sample_rate != ref.sample_rate:
            raise InvalidInputError("EMF and current waveforms must share length and rate")
    power = np.zeros(len(ref))
    for e, i in zip(emfs, currents):
        power = power + e.samples * i.samples
    return Waveform(power / mech_speed, ref.sample_rate, ref.start_time, "N*m")


def peak_to_peak_ripple(w: Waveform) -> float:
    """Peak-to-peak excursion as a percentage of the mean."""
    mean = float(np.mean(w.samples))
    if mean == 0.0:
        raise UndefinedRippleError("ripple is undefined for a zero-mean waveform")
    return 100.0 * (float(np.max(w.samples)) - float(np.min(w.samples))) / abs(mean)


def fundamental_amplitude(w: Waveform, bin_index: int | None = None) -> float:
    """Peak amplitude of one DFT bin; by default the largest non-DC bin."""
    spec = np.abs(np.fft.rfft(w.samples)) * 2 / len(w)
    if bin_index is None:
        bin_index = int(np.argmax(spec[1:])) + 1
    return float(spec[bin_index])


def amplitude_variation(faulty: Waveform, healthy: Waveform) -> float:
    """Percentage change of the fundamental peak relative to the healthy one.

    The fundamental is the strongest non-DC bin of the healthy waveform and
    the faulty waveform is read at that same bin.
    """
    if len(faulty) != len(healthy) or faulty.sample_rate != healthy.sample_rate:
        raise InvalidInputError("waveforms must share length and sample rate")
    spec = np.abs(np.fft.rfft(healthy.samples))
    if len(spec) < 2 or spec[1:].max() <= 0:
        raise InvalidInputError("healthy waveform has no fundamental component")
    k = int(np.argmax(spec[1:])) + 1
    ref = fundamental_amplitude(healthy, k)
    return 100.0 * abs(fundamental_amplitude(faulty, k) - ref) / ref


def synthesize_waveforms(motor: MotorSpec, fault: FaultSpec = Healthy(),
                         sim: SimConfig = SimConfig()) -> WaveformSet:
    """Flux, back-EMF, current and torque waveforms for a motor under a fault.

    One mechanical revolution is computed and repeated ``mechanical_periods``
    times; every modelled fault is periodic over one revolution.

    Raises
    ------
    RotorContactError
        If the eccentricity closes the airgap.
    """
    coils = phase_coils(motor)
    if sim.diagnostic_coil >= motor.main_tooth_count:
        raise InvalidSpecError(
            f"diagnostic_coil {sim.diagnostic_coil} exceeds {motor.main_tooth_count} coils")
    n = sim.samples_per_mechanical_period
    rate = n * motor.mechanical_frequency
    t_one = np.arange(n) / rate
    flux_one = coil_fluxes(motor, fault, sim, t_one)
    coil_flux = np.tile(flux_one, (1, sim.mechanical_periods))
    coil_w = tuple(Waveform(row, rate, 0.0, "Wb") for row in coil_flux)

    flux = tuple(Waveform(coil_flux[list(group)].mean(axis=0), rate, 0.0, "Wb")
                 for group in coils)
    emf = tuple(back_emf(f, motor.turns_per_phase) for f in flux)

    t = np.arange(sim.total_samples) / rate
    omega_e = 2 * math.pi * motor.supply_frequency
    fund_bin = sim.mechanical_periods * motor.pole_pairs
    currents = []
    for e in emf:
        angle = float(np.angle(np.fft.rfft(e.samples)[fund_bin]))
        currents.append(Waveform(
            motor.terminal_current_peak * np.cos(omega_e * t + angle + sim.current_phase_offset),
            rate, 0.0, "A"))
    torque = em_torque(emf, currents, motor.mech_speed)
    return WaveformSet(flux, emf, tuple(currents), torque, motor.mech_speed, coil_w,
                       motor.turns_per_phase, sim.diagnostic_coil)


@dataclass(frozen=True)
class Calibration:
    airgap_flux_density: float
    turns_per_phase: float
    flux_peak: float
    emf_peak: float
    mean_torque: float


def calibrate(motor: MotorSpec = MotorSpec(), sim: SimConfig = SimConfig(),
              flux_target: float = TARGET_FLUX_PEAK,
              emf_target: float = TARGET_EMF_PEAK) -> Calibration:
    """Solve for B_PM and the turn count that hit the healthy flux and EMF peaks.

    Flux is linear in B_PM and EMF linear in the turn count, so one unit run
    fixes both. The turn count is kept fractional (effective turns).
    """
    unit = replace(motor, airgap_flux_density=1.0, turns_per_phase=1.0)
    ws = synthesize_waveforms(unit, Healthy(), sim)
    k = sim.mechanical_periods * motor.pole_pairs
    b_pm = flux_target / fundamental_amplitude(ws.flux_linkage[0], k)
    turns = emf_target / (b_pm * fundamental_amplitude(ws.back_emf[0], k))
    tuned = replace(motor, airgap_flux_density=b_pm, turns_per_phase=turns)
    check = synthesize_waveforms(tuned, Healthy(), sim)
    return Calibration(b_pm, turns, fundamental_amplitude(check.flux_linkage[0], k),
                       fundamental_amplitude(check.back_emf[0], k),
                       float(np.mean(check.torque.samples)))


__all__ = ["SimConfig", "Waveform", "WaveformSet", "Calibration", "synthesize_waveforms",
           "back_emf", "em_torque", "peak_to_peak_ripple", "amplitude_variation",
           "fundamental_amplitude", "calibrate", "phase_coils", "coil_fluxes",
           "RotorContactError"]

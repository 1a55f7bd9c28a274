"""Motor and vehicle parameter sets plus the analytical sizing equations.

All quantities are SI (m, rad, s, T, A, N, W). Defaults describe the 62 kW,
8-pole / 12-slot surface-mounted PMSM used throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DemagnetizationRiskError, InvalidSpecError

# Calibrated so that the healthy phase flux fundamental is 0.00589 Wb and the
# back-EMF fundamental 697 V (see ``synthesis.calibrate``).
CALIBRATED_AIRGAP_FLUX_DENSITY = 0.8810246399961326
CALIBRATED_TURNS_PER_PHASE = 100.02073004357503


@dataclass(frozen=True)
class VehicleSpec:
    mass: float
    rolling_resistance_coeff: float
    air_density: float
    drag_coeff: float
    frontal_area: float
    wheel_radius: float
    gear_ratio: float
    gravity: float = 9.81

    def __post_init__(self):
        for name in ("mass", "air_density", "frontal_area", "wheel_radius", "gear_ratio", "gravity"):
            if not getattr(self, name) > 0:
                raise InvalidSpecError(f"{name} must be > 0, got {getattr(self, name)!r}")
        for name in ("rolling_resistance_coeff", "drag_coeff"):
            if not getattr(self, name) >= 0:
                raise InvalidSpecError(f"{name} must be >= 0, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class OperatingPoint:
    propulsion_force: float
    angular_speed: float
    torque: float
    power: float


def vehicle_operating_point(v: VehicleSpec, speed: float, accel: float = 0.0,
                            grade: float = 0.0) -> OperatingPoint:
    """Traction force, motor speed, torque and power needed to move the vehicle.

    Parameters
    ----------
    speed : float
        Vehicle speed in m/s (>= 0).
    accel : float
        Longitudinal acceleration in m/s^2.
    grade : float
        Road grade angle in rad.
    """
    if speed < 0:
        raise InvalidSpecError(f"speed must be >= 0, got {speed!r}")
    if v.wheel_radius <= 0 or v.gear_ratio <= 0:
        raise InvalidSpecError("wheel_radius and gear_ratio must be > 0")
    force = (v.mass * v.gravity * v.rolling_resistance_coeff
             + 0.5 * v.air_density * v.drag_coeff * v.frontal_area * speed ** 2
             + v.mass * accel
             + v.mass * v.gravity * math.sin(grade))
    omega = speed / v.wheel_radius * v.gear_ratio
    torque = force * v.wheel_radius / v.gear_ratio
    return OperatingPoint(force, omega, torque, torque * omega)


@dataclass(frozen=True)
class MotorSpec:
    """Geometric, electrical and magnetic parameters of the SPMSM.

    ``average_diameter`` and ``magnet_arc_angle`` default to ``None`` and are
    then derived: the mean of the stator bore and rotor diameters, and 80 % of
    the pole pitch respectively. Use :attr:`mean_diameter` and
    :attr:`magnet_arc` to read the resolved values.
    """

    stator_outer_diameter: float = 0.174
    stator_inner_diameter: float = 0.102
    rotor_outer_diameter: float = 0.082
    core_length: float = 0.250
    airgap: float = 0.002
    magnet_height: float = 0.00776
    magnet_count: int = 8
    slot_count: int = 12
    pole_pairs: int = 4
    pole_count: int = 8
    terminal_current_peak: float = 59.5
    supply_frequency: float = 188.3
    rated_speed: float = 2824.0
    turns_per_phase: float = CALIBRATED_TURNS_PER_PHASE
    average_diameter: float | None = None
    tooth_height: float = 0.020
    principal_tooth_angle: float = math.pi / 6
    inserted_tooth_angle: float = math.pi / 18
    slot_angle: float = math.pi / 18
    airgap_flux_density: float = CALIBRATED_AIRGAP_FLUX_DENSITY
    stator_yoke_flux_density: float = 1.5
    fill_factor: float = 0.95
    magnet_remanence_20C: float = 1.16
    magnet_temp_coeff: float = -0.0012
    magnet_rel_permeability: float = 1.044
    magnet_arc_angle: float | None = None
    leakage_coeff: float = 1.0

    def __post_init__(self):
        positive = ("stator_outer_diameter", "stator_inner_diameter", "rotor_outer_diameter",
                    "core_length", "airgap", "magnet_height", "supply_frequency", "rated_speed",
                    "turns_per_phase", "magnet_remanence_20C", "magnet_rel_permeability",
                    "stator_yoke_flux_density", "fill_factor", "leakage_coeff")
        for name in positive:
            if not getattr(self, name) > 0:
                raise InvalidSpecError(f"{name} must be > 0, got {getattr(self, name)!r}")
        for name in ("terminal_current_peak", "airgap_flux_density", "tooth_height",
                     "principal_tooth_angle", "inserted_tooth_angle", "slot_angle"):
            if getattr(self, name) < 0:
                raise InvalidSpecError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        if self.pole_pairs < 1:
            raise InvalidSpecError("pole_pairs must be >= 1")
        if self.pole_count != 2 * self.pole_pairs:
            raise InvalidSpecError(
                f"pole_count ({self.pole_count}) must equal 2 * pole_pairs ({2 * self.pole_pairs})")
        if self.magnet_count != self.pole_count:
            raise InvalidSpecError("magnet_count must equal pole_count (one magnet per pole)")
        if self.slot_count != 12:
            raise InvalidSpecError("only the 12-slot, 6-main-tooth stator layout is modelled")
        if not self.stator_inner_diameter > self.rotor_outer_diameter:
            raise InvalidSpecError("stator_inner_diameter must exceed rotor_outer_diameter")
        if not self.stator_outer_diameter > self.stator_inner_diameter:
            raise InvalidSpecError("stator_outer_diameter must exceed stator_inner_diameter")
        radial = (self.stator_inner_diameter - self.rotor_outer_diameter) / 2
        stack = self.airgap + self.magnet_height
        if abs(radial - stack) > 0.05 * stack:
            raise InvalidSpecError(
                f"airgap + magnet_height ({stack:.6g} m) must match the bore/rotor radius "
                f"difference ({radial:.6g} m) within 5 %")
        f_mech = self.rated_speed / 60.0 * self.pole_pairs
        if abs(f_mech - self.supply_frequency) > 0.005 * self.supply_frequency:
            raise InvalidSpecError(
                f"rated_speed * pole_pairs / 60 = {f_mech:.6g} Hz is not within 0.5 % of "
                f"supply_frequency {self.supply_frequency:.6g} Hz")
        arc = self.magnet_arc
        if not 0 < arc <= self.pole_pitch * (1 + 1e-12):
            raise InvalidSpecError(f"magnet_arc_angle must lie in (0, pole pitch], got {arc!r}")

    # -- derived quantities ---------------------------------------------------
    @property
    def mean_diameter(self) -> float:
        if self.average_diameter is not None:
            return self.average_diameter
        return (self.stator_inner_diameter + self.rotor_outer_diameter) / 2

    @property
    def pole_pitch(self) -> float:
        return math.pi / self.pole_pairs

    @property
    def magnet_arc(self) -> float:
        if self.magnet_arc_angle is not None:
            return self.magnet_arc_angle
        return 0.8 * self.pole_pitch

    @property
    def stator_radius(self) -> float:
        return self.stator_inner_diameter / 2

    @property
    def main_tooth_count(self) -> int:
        return self.slot_count // 2

    @property
    def mechanical_frequency(self) -> float:
        """Synchronous rotor frequency f_s / p in Hz."""
        return self.supply_frequency / self.pole_pairs

    @property
    def mech_speed(self) -> float:
        """Synchronous rotor speed in rad/s."""
        return 2 * math.pi * self.mechanical_frequency

    @property
    def magnetic_gap(self) -> float:
        """Airgap plus the magnet's recoil-permeability-scaled height."""
        return self.airgap + self.magnet_height / self.magnet_rel_permeability


@dataclass(frozen=True)
class StatorGeometry:
    slot_width: float
    principal_tooth_section: float
    inserted_tooth_section: float
    slot_section: float


@dataclass(frozen=True)
class RotorGeometry:
    magnet_height: float
    remanence_at_temp: float
    yoke_thickness: float


def consistent_slot_angle(slot_count: int, principal_tooth_angle: float,
                          inserted_tooth_angle: float) -> float:
    """Slot angular width that closes one main-tooth pitch exactly."""
    n_d = slot_count // 2
    return 0.5 * (2 * math.pi / n_d - principal_tooth_angle - inserted_tooth_angle)


def slot_section_from_teeth(m: MotorSpec) -> float:
    """Slot section from the tooth angles (the bracketed form)."""
    half = (m.mean_diameter + m.airgap) / 2
    return consistent_slot_angle(m.slot_count, m.principal_tooth_angle,
                                 m.inserted_tooth_angle) * half * m.core_length


def size_stator_geometry(m: MotorSpec) -> StatorGeometry:
    n_d = m.slot_count // 2
    if m.principal_tooth_angle + m.inserted_tooth_angle >= 2 * math.pi / n_d:
        raise InvalidSpecError("principal + inserted tooth angles exceed the main-tooth pitch")
    half = (m.mean_diameter + m.airgap) / 2
    slot_width = (m.mean_diameter + m.airgap + m.tooth_height) / 2 * m.slot_angle
    return StatorGeometry(
        slot_width=slot_width,
        principal_tooth_section=half * m.principal_tooth_angle * m.core_length,
        inserted_tooth_section=half * m.inserted_tooth_angle * m.core_length,
        slot_section=m.slot_angle * half * m.core_length,
    )


def remanence_at(m: MotorSpec, magnet_temp: float) -> float:
    return m.magnet_remanence_20C * (1 + m.magnet_temp_coeff * (magnet_temp - 20.0))


def size_rotor_geometry(m: MotorSpec, magnet_temp: float = 20.0) -> RotorGeometry:
    """Magnet height from Ampere's law and rotor yoke thickness from flux continuity.

    Raises
    ------
    DemagnetizationRiskError
        If the temperature-corrected remanence does not exceed B_e / kappa.
    """
    br = remanence_at(m, magnet_temp)
    denom = br - m.airgap_flux_density / m.leakage_coeff
    if denom <= 0:
        raise DemagnetizationRiskError(
            f"remanence {br:.4g} T at {magnet_temp} degC cannot sustain "
            f"B_e/kappa = {m.airgap_flux_density / m.leakage_coeff:.4g} T")
    h_a = m.magnet_rel_permeability * m.airgap_flux_density * m.airgap / denom
    s_d = size_stator_geometry(m).principal_tooth_section
    h_cr = m.airgap_flux_density * s_d / (
        2 * m.stator_yoke_flux_density * m.core_length * m.fill_factor)
    return RotorGeometry(magnet_height=h_a, remanence_at_temp=br, yoke_thickness=h_cr)

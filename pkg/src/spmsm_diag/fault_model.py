"""Fault descriptions and the analytical fault physics.

Covers the airgap width under static, dynamic and mixed eccentricity, the
rotor PM field under healthy, uniformly and partially demagnetized magnets,
and the characteristic frequency patterns each fault family excites.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import ClassVar, Union

import numpy as np

from .errors import InvalidFaultError, RotorContactError
from .motor_core import MotorSpec

# ---------------------------------------------------------------------------
# Fault descriptions
# ---------------------------------------------------------------------------


def _check_ratio(name, value):
    if not 0.0 <= value < 1.0:
        raise InvalidFaultError(f"{name}={value!r} outside [0, 1)")


def _check_severity(value):
    if not 0.0 <= value <= 1.0:
        raise InvalidFaultError(f"severity M={value!r} outside [0, 1]")


def _check_pole(index):
    if int(index) != index or index < 0:
        raise InvalidFaultError(f"pole_index={index!r} must be a non-negative integer")


@dataclass(frozen=True)
class Healthy:
    tag: ClassVar[str] = "healthy"


@dataclass(frozen=True)
class StaticEcc:
    delta_s: float
    tag: ClassVar[str] = "SE"

    def __post_init__(self):
        _check_ratio("delta_s", self.delta_s)


@dataclass(frozen=True)
class DynamicEcc:
    delta_d: float
    tag: ClassVar[str] = "DE"

    def __post_init__(self):
        _check_ratio("delta_d", self.delta_d)


@dataclass(frozen=True)
class MixedEcc:
    """Static and dynamic offsets together.

    The worst-case clearance depends on the motor geometry, so rotor contact
    is reported by :func:`airgap_width` rather than at construction.
    """

    delta_s: float
    delta_d: float
    tag: ClassVar[str] = "ME"

    def __post_init__(self):
        _check_ratio("delta_s", self.delta_s)
        _check_ratio("delta_d", self.delta_d)


@dataclass(frozen=True)
class UniformDemag:
    severity: float
    tag: ClassVar[str] = "UD"

    def __post_init__(self):
        _check_severity(self.severity)


@dataclass(frozen=True)
class PartialDemagUniform:
    """One magnet weakened uniformly to ``severity`` of its healthy strength."""

    severity: float
    pole_index: int = 0
    tag: ClassVar[str] = "PD_urBpm"

    def __post_init__(self):
        _check_severity(self.severity)
        _check_pole(self.pole_index)


@dataclass(frozen=True)
class PartialDemagAsymmetric:
    """One magnet weakened linearly across its arc, from 1.0 down to ``severity``."""

    severity: float
    pole_index: int = 0
    tag: ClassVar[str] = "PD_ArBpm"

    def __post_init__(self):
        _check_severity(self.severity)
        _check_pole(self.pole_index)


@dataclass(frozen=True)
class PartialDemagArc:
    """One magnet's arc cut to ``arc_fraction`` of its length, from one edge."""

    arc_fraction: float
    pole_index: int = 0
    tag: ClassVar[str] = "PD_Arpmaa"

    def __post_init__(self):
        if not 0.0 < self.arc_fraction <= 1.0:
            raise InvalidFaultError(f"arc_fraction X={self.arc_fraction!r} outside (0, 1]")
        _check_pole(self.pole_index)


FaultSpec = Union[Healthy, StaticEcc, DynamicEcc, MixedEcc, UniformDemag,
                  PartialDemagUniform, PartialDemagAsymmetric, PartialDemagArc]

FAULT_TYPES = {cls.tag: cls for cls in (Healthy, StaticEcc, DynamicEcc, MixedEcc, UniformDemag,
                                        PartialDemagUniform, PartialDemagAsymmetric,
                                        PartialDemagArc)}
ECCENTRICITY_TAGS = ("SE", "DE", "ME")
PARTIAL_DEMAG_TAGS = ("PD_urBpm", "PD_ArBpm", "PD_Arpmaa")

_FIELDS = {
    "SE": ("delta_s",),
    "DE": ("delta_d",),
    "ME": ("delta_s", "delta_d"),
    "UD": ("severity",),
    "PD_urBpm": ("severity", "pole_index"),
    "PD_ArBpm": ("severity", "pole_index"),
    "PD_Arpmaa": ("arc_fraction", "pole_index"),
    "healthy": (),
}


def fault_to_dict(fault: FaultSpec) -> dict:
    out = {"fault": fault.tag}
    for name in _FIELDS[fault.tag]:
        out[name] = getattr(fault, name)
    return out


def fault_from_dict(data: dict) -> FaultSpec:
    """Build a fault from ``{"fault": tag, **severity fields}``.

    Tags are matched case-insensitively. Unknown or missing fields raise
    :class:`InvalidFaultError` naming the field.
    """
    data = dict(data)
    raw = data.pop("fault", "healthy")
    lookup = {k.lower(): k for k in FAULT_TYPES}
    tag = lookup.get(str(raw).lower())
    if tag is None:
        raise InvalidFaultError(f"unknown fault tag {raw!r}; expected one of {sorted(FAULT_TYPES)}")
    allowed = _FIELDS[tag]
    for key in data:
        if key not in allowed:
            raise InvalidFaultError(f"field {key!r} not valid for fault {tag!r} (allowed: {allowed})")
    cls = FAULT_TYPES[tag]
    try:
        return cls(**data)
    except TypeError as exc:
        raise InvalidFaultError(f"fault {tag!r}: {exc}") from None


def eccentricity_part(fault: FaultSpec) -> FaultSpec:
    return fault if fault.tag in ECCENTRICITY_TAGS else Healthy()


def demag_part(fault: FaultSpec) -> FaultSpec:
    return Healthy() if fault.tag in ECCENTRICITY_TAGS else fault


# ---------------------------------------------------------------------------
# Airgap geometry
# ---------------------------------------------------------------------------


def mixed_ecc_ratio(delta_s, delta_d, theta):
    """Combined eccentricity ratio for static and dynamic offsets at angle ``theta``."""
    _check_ratio("delta_s", delta_s)
    _check_ratio("delta_d", delta_d)
    return np.sqrt(np.maximum(delta_s ** 2 + delta_d ** 2
                              + 2 * delta_s * delta_d * np.cos(theta), 0.0))


def mixed_ecc_angle(delta_s, delta_d, rotor_angle):
    """Direction of the rotor-centre offset as seen from the stator centre."""
    return np.arctan2(delta_d * np.sin(rotor_angle), delta_s + delta_d * np.cos(rotor_angle))


def airgap_width(fault: FaultSpec, theta, t, motor: MotorSpec):
    """Radial clearance (m) at stator angle ``theta`` and time ``t``.

    ``theta`` and ``t`` broadcast against each other. Demagnetization faults
    leave the gap uniform.

    Raises
    ------
    RotorContactError
        If the clearance is zero or negative anywhere in the evaluated grid.
    """
    theta = np.asarray(theta, dtype=float)
    t = np.asarray(t, dtype=float)
    g = motor.airgap
    rotor_angle = motor.mech_speed * t
    tag = fault.tag
    if tag == "SE":
        gap = g * (1 - fault.delta_s * np.cos(theta)) + 0 * rotor_angle
    elif tag == "DE":
        gap = g * (1 - fault.delta_d * np.cos(rotor_angle - theta))
    elif tag == "ME":
        delta_m = mixed_ecc_ratio(fault.delta_s, fault.delta_d, rotor_angle)
        phi_m = mixed_ecc_angle(fault.delta_s, fault.delta_d, rotor_angle)
        r_s = motor.stator_radius
        r_r = r_s - g
        rel = theta - phi_m
        offset = delta_m * g
        radicand = r_r ** 2 - (offset * np.sin(rel)) ** 2
        if np.any(radicand < 0):
            raise RotorContactError(f"mixed eccentricity ({fault.delta_s}, {fault.delta_d}) "
                                    "moves the rotor outside the bore")
        gap = r_s - offset * np.cos(rel) - np.sqrt(radicand)
    else:
        gap = np.full(np.broadcast(theta, rotor_angle).shape, g)
    if np.any(gap <= 0):
        raise RotorContactError(
            f"{tag} fault closes the airgap (minimum clearance {float(np.min(gap)):.3g} m)")
    return gap


# ---------------------------------------------------------------------------
# Rotor PM field
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PMFieldModel:
    """Per-pole description of an ideal rectangular surface-magnet field.

    Pole ``k`` is centred at ``(k + 1/2) * pi / p`` with polarity ``(-1)**k``.
    Its magnet covers ``[start_k, start_k + arcs[k]]`` where ``start_k`` is the
    healthy leading edge, so arc reductions shorten the trailing side only.
    Within the magnet the strength varies linearly from ``start_scales[k]`` to
    ``end_scales[k]``.
    """

    b_pm: float
    pole_pairs: int
    arc: float
    start_scales: tuple = ()
    end_scales: tuple = ()
    arcs: tuple = ()

    def __post_init__(self):
        n = 2 * self.pole_pairs
        if not self.start_scales:
            object.__setattr__(self, "start_scales", (1.0,) * n)
        if not self.end_scales:
            object.__setattr__(self, "end_scales", tuple(self.start_scales))
        if not self.arcs:
            object.__setattr__(self, "arcs", (self.arc,) * n)
        for seq in (self.start_scales, self.end_scales, self.arcs):
            if len(seq) != n:
                raise InvalidFaultError(f"per-pole tuples need {n} entries")
        pitch = math.pi / self.pole_pairs
        for s in self.start_scales + self.end_scales:
            if not 0.0 <= s <= 1.0:
                raise InvalidFaultError(f"pole scale {s!r} outside [0, 1]")
        for a in self.arcs:
            if not 0.0 < a <= pitch * (1 + 1e-12):
                raise InvalidFaultError(f"pole arc {a!r} outside (0, pole pitch]")

    @classmethod
    def from_motor(cls, motor: MotorSpec) -> PMFieldModel:
        return cls(b_pm=motor.airgap_flux_density, pole_pairs=motor.pole_pairs,
                   arc=motor.magnet_arc)

    @property
    def pole_count(self) -> int:
        return 2 * self.pole_pairs

    @property
    def is_symmetric(self) -> bool:
        return (len(set(self.start_scales + self.end_scales)) == 1
                and len(set(self.arcs)) == 1)

    def with_fault(self, fault: FaultSpec) -> PMFieldModel:
        """Return the field model with the fault's magnet edits applied.

        Eccentricity faults do not touch the magnets and return ``self``.
        """
        tag = fault.tag
        if tag in ("healthy",) + ECCENTRICITY_TAGS:
            return self
        if tag == "UD":
            n = self.pole_count
            return replace(self, start_scales=tuple(s * fault.severity for s in self.start_scales),
                           end_scales=tuple(s * fault.severity for s in self.end_scales),
                           arcs=self.arcs[:n])
        k = fault.pole_index
        if k >= self.pole_count:
            raise InvalidFaultError(
                f"pole_index {k} out of range for a {self.pole_count}-pole rotor")
        starts, ends, arcs = list(self.start_scales), list(self.end_scales), list(self.arcs)
        if tag == "PD_urBpm":
            starts[k] *= fault.severity
            ends[k] *= fault.severity
        elif tag == "PD_ArBpm":
            ends[k] *= fault.severity
        elif tag == "PD_Arpmaa":
            arcs[k] *= fault.arc_fraction
        return replace(self, start_scales=tuple(starts), end_scales=tuple(ends), arcs=tuple(arcs))

    def segments(self):
        """Magnet segments as ``(start, end, value_at_start, value_at_end)`` in rad / T."""
        pitch = math.pi / self.pole_pairs
        out = []
        for k in range(self.pole_count):
            start = (k + 0.5) * pitch - self.arc / 2
            sign = 1.0 if k % 2 == 0 else -1.0
            out.append((start, start + self.arcs[k],
                        sign * self.b_pm * self.start_scales[k],
                        sign * self.b_pm * self.end_scales[k]))
        return out

    def edges(self) -> np.ndarray:
        """Sorted magnet edge angles within one mechanical turn."""
        e = [a for s in self.segments() for a in s[:2]]
        return np.sort(np.mod(e, 2 * math.pi))

    def evaluate(self, theta_r) -> np.ndarray:
        theta = np.mod(np.asarray(theta_r, dtype=float), 2 * math.pi)
        out = np.zeros_like(theta)
        for start, end, v0, v1 in self.segments():
            for shift in (0.0, 2 * math.pi, -2 * math.pi):
                x = theta + shift
                inside = (x >= start) & (x <= end)
                if np.any(inside):
                    frac = (x[inside] - start) / (end - start)
                    out[inside] = v0 + (v1 - v0) * frac
        return out


def pm_fourier_coefficient(n: int, model: PMFieldModel) -> float:
    """Amplitude of the ``sin(n p theta)`` term of a symmetric pole pattern."""
    if not model.is_symmetric:
        raise InvalidFaultError("closed-form coefficients need a symmetric pole pattern")
    if n < 1 or int(n) != n:
        raise InvalidFaultError(f"harmonic order must be a positive integer, got {n!r}")
    if n % 2 == 0:
        return 0.0
    b = model.b_pm * model.start_scales[0]
    p, alpha = model.pole_pairs, model.arcs[0]
    return 4 * b / (math.pi * n) * math.sin(n * math.pi / 2) * math.sin(n * p * alpha / 2)


def pm_flux_density(fault: FaultSpec, model: PMFieldModel, theta_r):
    """Rotor-frame PM flux density (T) at mechanical angle ``theta_r``.

    Eccentricity faults leave the field untouched; their effect enters through
    the airgap permeance instead.
    """
    return model.with_fault(fault).evaluate(theta_r)


# ---------------------------------------------------------------------------
# Characteristic frequencies
# ---------------------------------------------------------------------------

PATTERN_KINDS = ("eccentricity", "healthy", "partial_demag")


@dataclass(frozen=True)
class FrequencyPattern:
    kind: str
    frequencies: tuple = field(default=())
    k_max: int = 1

    def __post_init__(self):
        if self.kind not in PATTERN_KINDS:
            raise ValueError(f"unknown pattern kind {self.kind!r}")
        f = self.frequencies
        if any(x <= 0 for x in f) or any(b <= a for a, b in zip(f, f[1:])):
            raise ValueError("pattern frequencies must be positive and strictly ascending")


def fault_frequency_pattern(kind: str, f_s: float, p: int, k_max: int) -> FrequencyPattern:
    """Frequencies where a fault family is expected to leave spectral lines.

    Eccentricity and partial demagnetization share ``f_s (1 +- (2k-1)/p)``;
    healthy and uniformly demagnetized machines carry only the odd harmonics
    ``(2k-1) f_s``. Non-positive values are dropped.
    """
    if kind == "uniform_demag":
        kind = "healthy"
    if kind not in PATTERN_KINDS:
        raise ValueError(f"unknown pattern kind {kind!r}; expected one of {PATTERN_KINDS}")
    if f_s <= 0 or p < 1 or k_max < 1:
        raise ValueError("need f_s > 0, p >= 1 and k_max >= 1")
    freqs = set()
    for k in range(1, k_max + 1):
        if kind == "healthy":
            freqs.add((2 * k - 1) * f_s)
        else:
            for sign in (1, -1):
                freqs.add(f_s * (p + sign * (2 * k - 1)) / p)
    # drop binary round-off (141.22500000000002) so columns print as written
    out = sorted(round(f, 9) for f in freqs if f > 1e-9)
    return FrequencyPattern(kind, tuple(out), k_max)


def sideband_pattern(motor: MotorSpec, k_max: int = 4) -> FrequencyPattern:
    """The six-column sideband pattern used for harmonic tables and diagnosis."""
    return fault_frequency_pattern("eccentricity", motor.supply_frequency, motor.pole_pairs, k_max)

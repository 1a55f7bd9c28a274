"""Rule-based fault classification from sideband amplitude deltas."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InconsistentScenariosError, InvalidInputError
from .spectral import ASBCVector

LABELS = ("Healthy", "StaticEcc", "DynamicEcc", "MixedEcc", "PartialDemag")


@dataclass(frozen=True)
class DeltaVector:
    """Per-frequency dB change of a fault ASBC vector over the healthy one."""

    frequencies: tuple
    values: tuple

    def __post_init__(self):
        if len(self.values) != 6 or len(self.frequencies) != 6:
            raise InvalidInputError(f"delta vectors carry six values, got {len(self.values)}")
        if not all(math.isfinite(v) for v in self.values):
            raise InvalidInputError("delta values must be finite")


@dataclass(frozen=True)
class Thresholds:
    detect_db: float = 5.0
    pd_floor_db: float = 20.0
    mixed_f1_db: float = 5.0

    def __post_init__(self):
        for name in ("detect_db", "pd_floor_db", "mixed_f1_db"):
            if not getattr(self, name) >= 0:
                raise InvalidInputError(f"{name} must be >= 0")
        if not self.pd_floor_db > self.detect_db:
            raise InvalidInputError("pd_floor_db must exceed detect_db")


@dataclass(frozen=True)
class DiagnosisReport:
    label: str
    severity_score: float
    delta_vector: DeltaVector
    notes: tuple
    thresholds: Thresholds

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "severity_db": self.severity_score,
            "deltas": [{"freq_hz": f, "delta_db": d}
                       for f, d in zip(self.delta_vector.frequencies, self.delta_vector.values)],
            "notes": list(self.notes),
            "thresholds": asdict(self.thresholds),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def baseline_delta(fault: ASBCVector, healthy: ASBCVector) -> DeltaVector:
    if fault.frequencies != healthy.frequencies:
        raise InconsistentScenariosError(
            f"frequency columns differ: {fault.frequencies} vs {healthy.frequencies}")
    diff = fault.values - healthy.values
    return DeltaVector(tuple(float(f) for f in fault.frequencies),
                       tuple(float(v) for v in diff))


def _cmp(name, value, op, limit):
    passed = value >= limit if op == ">=" else value < limit
    return passed, f"{name} = {value:+.2f} dB {op} {limit:.2f} dB: {'yes' if passed else 'no'}"


def classify(d: DeltaVector, t: Thresholds = Thresholds(),
             fundamental_delta: float | None = None) -> DiagnosisReport:
    """Decision tree over the six deltas.

    1. every delta below ``detect_db``: Healthy
    2. every delta at or above ``pd_floor_db``: PartialDemag
    3. the second column at or above ``pd_floor_db``: MixedEcc when the first
       column reaches ``mixed_f1_db``, otherwise DynamicEcc
    4. anything else: StaticEcc

    When ``fundamental_delta`` (dB change of the supply-frequency line) is
    given, a Healthy verdict with the fundamental down by ``detect_db`` or
    more gets an extra note: the support is healthy but the field is weaker,
    which is how uniform demagnetization shows up.
    """
    v = d.values
    notes = []
    hit, msg = _cmp("max delta", max(v), "<", t.detect_db)
    notes.append(msg)
    if hit:
        if fundamental_delta is not None:
            low, msg = _cmp("fundamental delta", -fundamental_delta, ">=", t.detect_db)
            notes.append(msg.replace("fundamental delta =", "fundamental drop ="))
            if low:
                notes.append("healthy spectral support, fundamental attenuated")
        return DiagnosisReport("Healthy", max(v), d, tuple(notes), t)
    hit, msg = _cmp("min delta", min(v), ">=", t.pd_floor_db)
    notes.append(msg)
    if hit:
        label = "PartialDemag"
    else:
        hit, msg = _cmp("delta F2", v[1], ">=", t.pd_floor_db)
        notes.append(msg)
        if hit:
            hit, msg = _cmp("delta F1", v[0], ">=", t.mixed_f1_db)
            notes.append(msg)
            label = "MixedEcc" if hit else "DynamicEcc"
        else:
            label = "StaticEcc"
    return DiagnosisReport(label, max(v), d, tuple(notes), t)


def rank_pd_variants(reports) -> list:
    """Order PD scenarios by mean ASBC, strongest first.

    Ties on the mean fall back to the highest-frequency column.
    Returns the labels in ranked order.
    """
    reports = list(reports)
    if len(reports) < 2:
        raise InvalidInputError("ranking needs at least two PD scenarios")
    cols = reports[0][1].frequencies
    for label, vec in reports:
        if vec.frequencies != cols:
            raise InconsistentScenariosError(f"scenario {label!r} has different columns")
    keyed = [(-float(np.mean(vec.values)), -float(vec.values[-1]), i, label)
             for i, (label, vec) in enumerate(reports)]
    return [label for *_, label in sorted(keyed)]

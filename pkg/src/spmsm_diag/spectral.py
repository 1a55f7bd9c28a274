"""Single-sided amplitude spectra and sideband (ASBC) extraction."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import InconsistentScenariosError, InvalidInputError, OutOfBandError
from .fault_model import FrequencyPattern
from .synthesis import Waveform

FLOOR_V = 1e-12
FLOOR_DB = 20 * math.log10(FLOOR_V)


def to_db(amplitude):
    """Amplitude in volts to dB re 1 V, clamped at the -240 dB floor."""
    a = np.asarray(amplitude, dtype=float)
    return 20 * np.log10(np.maximum(a, FLOOR_V))


@dataclass(frozen=True)
class Spectrum:
    """Rectangular-window, single-sided amplitude spectrum.

    ``amplitudes`` keeps the linear peak amplitudes (V) next to their dB
    values so energy checks need no round trip through the logarithm.
    """

    bin_frequencies: np.ndarray
    amplitudes_db: np.ndarray
    resolution: float
    amplitudes: np.ndarray
    sample_rate: float
    window: str = "rectangular"

    @property
    def nyquist(self) -> float:
        return self.sample_rate / 2

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["freq_hz", "amplitude_db"])
        for f, a in zip(self.bin_frequencies, self.amplitudes_db):
            writer.writerow([repr(float(f)), repr(float(a))])
        return buf.getvalue()


def spectrum(w: Waveform) -> Spectrum:
    """Single-sided DFT amplitude spectrum of a power-of-two-length waveform.

    Bins above DC carry ``2|X_k|/N``; DC and, for even lengths, the Nyquist
    bin carry ``|X_k|/N`` since they have no mirrored partner.
    """
    n = len(w)
    if n < 2 or n & (n - 1):
        raise InvalidInputError(f"spectrum needs a power-of-two length, got {n}")
    amps = np.abs(np.fft.rfft(w.samples)) / n
    amps[1:-1] *= 2
    resolution = w.sample_rate / n
    freqs = np.arange(len(amps)) * resolution
    return Spectrum(freqs, to_db(amps), resolution, amps, w.sample_rate)


def spectral_energy(s: Spectrum, length: int) -> float:
    """Sum of squared samples implied by the spectrum (Parseval)."""
    a = s.amplitudes.copy()
    a[1:-1] /= 2
    full = a[0] ** 2 + 2 * np.sum(a[1:-1] ** 2) + a[-1] ** 2
    return float(full * length)


@dataclass(frozen=True)
class ASBCEntry:
    target_hz: float
    matched_hz: float
    amplitude_db: float


@dataclass(frozen=True)
class ASBCVector:
    entries: tuple

    @property
    def frequencies(self) -> tuple:
        return tuple(e.target_hz for e in self.entries)

    @property
    def values(self) -> np.ndarray:
        return np.array([e.amplitude_db for e in self.entries])

    def __len__(self):
        return len(self.entries)

    @classmethod
    def from_values(cls, frequencies, values) -> ASBCVector:
        return cls(tuple(ASBCEntry(float(f), float(f), float(v))
                         for f, v in zip(frequencies, values)))


def asbc(s: Spectrum, pattern: FrequencyPattern) -> ASBCVector:
    """Spectrum amplitude at the nearest bin to each pattern frequency.

    Raises
    ------
    OutOfBandError
        If a pattern frequency lies above the Nyquist limit.
    """
    entries = []
    for f in pattern.frequencies:
        if f > s.nyquist:
            raise OutOfBandError(f"pattern frequency {f} Hz exceeds Nyquist {s.nyquist} Hz")
        k = int(round(f / s.resolution))
        entries.append(ASBCEntry(float(f), float(s.bin_frequencies[k]),
                                 float(s.amplitudes_db[k])))
    return ASBCVector(tuple(entries))


@dataclass(frozen=True)
class HarmonicTable:
    columns: tuple
    rows: tuple  # (label, ASBCVector) pairs in input order

    @property
    def labels(self) -> tuple:
        return tuple(label for label, _ in self.rows)

    def row(self, label: str) -> ASBCVector:
        for name, vec in self.rows:
            if name == label:
                return vec
        raise KeyError(label)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["scenario"] + [repr(float(f)) for f in self.columns])
        for label, vec in self.rows:
            writer.writerow([label] + [repr(float(v)) for v in vec.values])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> HarmonicTable:
        """Parse a table written by :meth:`to_csv` or laid out the same way by hand."""
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidInputError("empty harmonic table") from None
        if not header or header[0].strip() != "scenario":
            raise InvalidInputError("harmonic table must start with a 'scenario' column")
        try:
            cols = tuple(float(h) for h in header[1:])
        except ValueError as exc:
            raise InvalidInputError(f"bad frequency column header: {exc}") from None
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or not rec[0].strip():
                continue
            if len(rec) != len(cols) + 1:
                raise InvalidInputError(
                    f"line {lineno}: expected {len(cols) + 1} fields, got {len(rec)}")
            try:
                vals = [float(v) for v in rec[1:]]
            except ValueError as exc:
                raise InvalidInputError(f"line {lineno}: {exc}") from None
            rows.append((rec[0].strip(), ASBCVector.from_values(cols, vals)))
        return cls(cols, tuple(rows))


def harmonic_table(scenarios, pattern: FrequencyPattern) -> HarmonicTable:
    """ASBC rows for every ``(label, Spectrum)`` pair on shared pattern columns."""
    scenarios = list(scenarios)
    if not scenarios:
        raise InvalidInputError("harmonic_table needs at least one scenario")
    ref = scenarios[0][1].resolution
    for label, s in scenarios:
        if not math.isclose(s.resolution, ref, rel_tol=1e-12):
            raise InconsistentScenariosError(
                f"scenario {label!r} has resolution {s.resolution} Hz, expected {ref} Hz")
    rows = tuple((label, asbc(s, pattern)) for label, s in scenarios)
    return HarmonicTable(tuple(pattern.frequencies), rows)

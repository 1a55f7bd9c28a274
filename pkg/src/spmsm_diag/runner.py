"""Batch runner: synthesize every scenario, analyse, diagnose and write files.

Data files (CSV, report JSON, SVG) depend only on the configuration, so two
runs of the same config produce byte-identical files whatever the worker
count. Timings and the tool version live in ``manifest.json`` only.
"""

from __future__ import annotations

import io
import json
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import ScenarioConfig
from .diagnosis import baseline_delta, classify, rank_pd_variants
from .errors import SpmsmError
from .fault_model import PARTIAL_DEMAG_TAGS, sideband_pattern
from .plots import line_chart_svg
from .spectral import ASBCVector, HarmonicTable, asbc, spectrum
from .synthesis import WaveformSet, synthesize_waveforms

WAVEFORM_HEADER = ("t_s,flux_a_wb,flux_b_wb,flux_c_wb,emf_a_v,emf_b_v,emf_c_v,"
                   "i_a_a,i_b_a,i_c_a,torque_nm")
SPECTRUM_PLOT_MAX_HZ = 1200.0


@dataclass
class ScenarioResult:
    name: str
    ok: bool
    seconds: float
    error: str = ""
    asbc: ASBCVector | None = None
    fundamental_db: float = 0.0
    texts: dict = field(default_factory=dict)


@dataclass
class RunManifest:
    config: dict
    files: dict
    version: str
    timings: dict
    status: dict
    notes: list

    @property
    def ok(self) -> bool:
        return all(v == "ok" for v in self.status.values())

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 2

    def to_json(self) -> str:
        return json.dumps({"config": self.config, "files": self.files, "version": self.version,
                           "timings_s": self.timings, "status": self.status,
                           "notes": self.notes}, indent=2, sort_keys=True) + "\n"


def waveform_csv(ws: WaveformSet) -> str:
    """All waveforms as CSV text with round-trip (17 significant digit) values."""
    cols = ws.columns()
    data = np.column_stack(list(cols.values()))
    buf = io.StringIO()
    np.savetxt(buf, data, delimiter=",", fmt="%.17g", header=",".join(cols), comments="")
    return buf.getvalue()


def read_waveform_csv(path) -> dict:
    """Load a waveform CSV back into ``{column: array}``."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, i] for i, name in enumerate(header)}


def _run_one(cfg: ScenarioConfig, index: int) -> ScenarioResult:
    scen = cfg.scenarios[index]
    start = time.perf_counter()
    try:
        ws = synthesize_waveforms(cfg.motor, scen.fault, cfg.sim)
        spec = spectrum(ws.diagnostic_emf)
        vec = asbc(spec, sideband_pattern(cfg.motor))
        fund_bin = int(round(cfg.motor.supply_frequency / spec.resolution))
        texts = {}
        if cfg.outputs.waveforms:
            texts[f"waveforms/{scen.name}.csv"] = waveform_csv(ws)
        if cfg.outputs.spectra:
            texts[f"spectra/{scen.name}.csv"] = spec.to_csv()
        if cfg.outputs.plots:
            n = cfg.sim.samples_per_mechanical_period
            texts[f"plots/{scen.name}_emf.svg"] = line_chart_svg(
                ws.time[:n] * 1e3, ws.diagnostic_emf.samples[:n],
                f"{scen.name}: coil EMF, one revolution", "time (ms)", "EMF (V)")
            keep = spec.bin_frequencies <= SPECTRUM_PLOT_MAX_HZ
            texts[f"plots/{scen.name}_spectrum.svg"] = line_chart_svg(
                spec.bin_frequencies[keep], spec.amplitudes_db[keep],
                f"{scen.name}: coil EMF spectrum", "frequency (Hz)", "amplitude (dB re 1 V)")
            texts[f"plots/{scen.name}_torque.svg"] = line_chart_svg(
                ws.time[:n] * 1e3, ws.torque.samples[:n],
                f"{scen.name}: electromagnetic torque", "time (ms)", "torque (N m)")
        return ScenarioResult(scen.name, True, time.perf_counter() - start, asbc=vec,
                              fundamental_db=float(spec.amplitudes_db[fund_bin]), texts=texts)
    except SpmsmError as exc:
        return ScenarioResult(scen.name, False, time.perf_counter() - start,
                              error=f"{type(exc).__name__}: {exc}")


def write_atomic(path: Path, text: str):
    """Write through a temporary file in the same folder, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(cfg: ScenarioConfig, workers: int | None = None) -> RunManifest:
    """Execute every scenario and write the requested outputs.

    A failing scenario is recorded in the manifest and skipped by the
    cross-scenario steps; the others still complete.
    """
    workers = cfg.workers if workers is None else workers
    n = len(cfg.scenarios)
    if workers > 1 and n > 1:
        with ProcessPoolExecutor(max_workers=min(workers, n)) as pool:
            results = list(pool.map(_run_one, [cfg] * n, range(n)))
    else:
        results = [_run_one(cfg, i) for i in range(n)]

    out_dir = Path(cfg.output_dir)
    files = {r.name: [] for r in results}
    notes = []
    # assemble serially, in config order
    for r in results:
        for rel, text in r.texts.items():
            write_atomic(out_dir / rel, text)
            files[r.name].append(rel)
        if not r.ok:
            notes.append(f"scenario {r.name!r} failed: {r.error}")

    good = [r for r in results if r.ok]
    pattern = sideband_pattern(cfg.motor)
    tags = {s.name: s.fault.tag for s in cfg.scenarios}
    shared = []
    if cfg.outputs.harmonic_table and good:
        # every scenario shares motor and sim settings, hence one bin grid
        table = HarmonicTable(tuple(pattern.frequencies), tuple((r.name, r.asbc) for r in good))
        write_atomic(out_dir / "harmonic_table.csv", table.to_csv())
        shared.append("harmonic_table.csv")

    summary = {}
    if cfg.outputs.report:
        base = cfg.baseline
        base_res = next((r for r in results if r.name == base.name), None)
        others = [r for r in good if r.name != base.name]
        if base_res is None or not base_res.ok:
            notes.append(f"reports skipped: baseline scenario {base.name!r} failed")
        elif not others:
            notes.append("reports suppressed: only the healthy baseline ran, "
                         "nothing to diagnose against it")
        else:
            for r in others:
                report = classify(baseline_delta(r.asbc, base_res.asbc), cfg.thresholds,
                                  fundamental_delta=r.fundamental_db - base_res.fundamental_db)
                rel = f"reports/{r.name}.json"
                write_atomic(out_dir / rel, report.to_json())
                files[r.name].append(rel)
                summary[r.name] = report.label
            pd = [(r.name, r.asbc) for r in others if tags[r.name] in PARTIAL_DEMAG_TAGS]
            body = {"labels": summary}
            if len(pd) >= 2:
                body["pd_ranking"] = rank_pd_variants(pd)
            write_atomic(out_dir / "summary.json",
                         json.dumps(body, indent=2, sort_keys=True) + "\n")
            shared.append("summary.json")
    if shared:
        files["_shared"] = shared

    manifest = RunManifest(
        config=cfg.snapshot(), files=files, version=__version__,
        timings={r.name: round(r.seconds, 6) for r in results},
        status={r.name: "ok" if r.ok else "failed" for r in results}, notes=notes)
    write_atomic(out_dir / "manifest.json", manifest.to_json())
    return manifest


__all__ = ["RunManifest", "run", "waveform_csv", "read_waveform_csv", "write_atomic",
           "WAVEFORM_HEADER"]

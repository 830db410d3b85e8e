"""Experiment harness: the five benchmark presets, seeded noise sweeps
with shared noise across methods, and CSV/JSON/plot-data reports.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .eigenmatrix import MethodConfig, Variant, recover
from .errors import UnknownPreset
from .kernels import (
    DEFAULT_BETA,
    CollocationNodes,
    Domain,
    KernelDescriptor,
    Kind,
    SampleSet,
    SpikeSignal,
    UNIT_DISK,
    add_noise,
    chebyshev_nodes,
    generate_samples,
    synthesize,
    uniform_circle_nodes,
)
from .metrics import match_and_error

CSV_COLUMNS = (
    "preset",
    "method",
    "sigma",
    "seed",
    "location_error",
    "weight_error",
    "gamma_or_tol",
    "condV_minus",
    "svd_gap",
    "wall_time_ms",
)


@dataclass(frozen=True)
class ExperimentPreset:
    id: str
    kernel: KernelDescriptor
    truth: SpikeSignal
    n_s: int
    n_a: int
    sample_law: str
    node_law: str
    sigma_list: tuple
    beta: float | None = None

    def nodes(self) -> CollocationNodes:
        if self.node_law == "circle":
            return uniform_circle_nodes(self.n_a)
        lo, hi = self.kernel.domain.lo, self.kernel.domain.hi
        return chebyshev_nodes(self.n_a, lo, hi)

    def samples(self, seed: int) -> SampleSet:
        beta = self.beta if self.beta is not None else DEFAULT_BETA
        return generate_samples(self.id, seed, beta=beta, n_s=self.n_s)


@dataclass
class RunRecord:
    preset: str
    method: str
    sigma: float
    seed: int
    location_error: float
    weight_error: float
    gamma_or_tol: float
    cond_v_minus: float
    svd_gap: float
    wall_time_ms: float
    locations: list = field(default_factory=list)  # [re, im] pairs
    weights: list = field(default_factory=list)
    failed_stage: str | None = None
    error: str | None = None

    def sort_key(self):
        # canonical output order regardless of execution order
        return (self.preset, self.sigma, self.seed, self.method)


def _default_sigmas(preset_id: str) -> tuple:
    if preset_id == "laplace":
        return (5e-2, 5e-3, 5e-4)
    return (1e-1, 1e-2, 1e-3)


def load_preset(
    id: str,
    beta: float = DEFAULT_BETA,
    n_s: int | None = None,
    n_a: int | None = None,
    sigma_list: tuple | None = None,
) -> ExperimentPreset:
    """The five benchmark configurations, optionally overriding grid sizes."""
    ones = np.ones(4)
    if id == "rational":
        kernel = KernelDescriptor(Kind.RATIONAL, UNIT_DISK)
        locs = 0.9 * np.exp(2j * np.pi * np.array([0.2, 0.5, 0.8, 1.0]))
        base_ns, law = 40, "circle"
    elif id == "spectral":
        kernel = KernelDescriptor(Kind.SPECTRAL_RATIONAL, Domain("interval", -1.0, 1.0))
        locs = np.array([-0.9, -0.2, 0.2, 0.9])
        base_ns, law = 256, "chebyshev"
    elif id == "fourier":
        kernel = KernelDescriptor(Kind.FOURIER, Domain("interval", -1.0, 1.0))
        locs = np.array([-0.9, 0.0, 0.5, 0.9])
        base_ns, law = 128, "chebyshev"
    elif id == "laplace":
        kernel = KernelDescriptor(Kind.LAPLACE, Domain("interval", 0.1, 2.1))
        locs = np.array([0.2, 1.1, 1.6, 2.0])
        base_ns, law = 100, "chebyshev"
    elif id == "deconv":
        kernel = KernelDescriptor(Kind.CAUCHY_SQUARED, Domain("interval", -1.0, 1.0))
        locs = np.array([-0.9, 0.0, 0.5, 0.9])
        base_ns, law = 128, "chebyshev"
    else:
        raise UnknownPreset(f"unknown preset {id!r}")
    return ExperimentPreset(
        id=id,
        kernel=kernel,
        truth=SpikeSignal(locs, ones),
        n_s=base_ns if n_s is None else n_s,
        n_a=32 if n_a is None else n_a,
        sample_law=id,
        node_law=law,
        sigma_list=tuple(sigma_list) if sigma_list is not None else _default_sigmas(id),
        beta=beta if id == "spectral" else None,
    )


def method_label(config: MethodConfig) -> str:
    return config.variant.value


def run_one(
    preset: ExperimentPreset, config: MethodConfig, sigma: float, seed: int, obs=None
) -> RunRecord:
    """Run one (method, sigma, seed) cell; failures land in the record."""
    samples = preset.samples(seed)
    if obs is None:
        u = synthesize(preset.kernel, preset.truth, samples)
        obs = add_noise(u, sigma, seed)
    nodes = preset.nodes()
    t0 = time.perf_counter()
    try:
        result = recover(config, preset.kernel, samples, nodes, obs)
    except Exception as exc:
        return RunRecord(
            preset=preset.id,
            method=method_label(config),
            sigma=sigma,
            seed=seed,
            location_error=float("nan"),
            weight_error=float("nan"),
            gamma_or_tol=float("nan"),
            cond_v_minus=float("nan"),
            svd_gap=float("nan"),
            wall_time_ms=(time.perf_counter() - t0) * 1e3,
            failed_stage=getattr(exc, "stage", "unknown"),
            error=f"{type(exc).__name__}: {exc}",
        )
    wall = (time.perf_counter() - t0) * 1e3
    errors = match_and_error(preset.truth, result)
    return RunRecord(
        preset=preset.id,
        method=method_label(config),
        sigma=sigma,
        seed=seed,
        location_error=errors.location_error,
        weight_error=errors.weight_error,
        gamma_or_tol=result.gamma_or_tol,
        cond_v_minus=result.diagnostics.get("cond_v_minus", float("nan")),
        svd_gap=result.diagnostics.get("svd_gap", float("nan")),
        wall_time_ms=wall,
        locations=[[z.real, z.imag] for z in result.locations],
        weights=[[z.real, z.imag] for z in result.weights],
    )


def run_sweep(preset: ExperimentPreset, methods, seeds, sigmas=None) -> list:
    """All (sigma, seed, method) cells; one noise draw shared per (sigma, seed)."""
    if not methods or not len(seeds):
        raise ValueError("need at least one method and one seed")
    sigmas = preset.sigma_list if sigmas is None else tuple(sigmas)
    records = []
    for sigma in sigmas:
        for seed in seeds:
            samples = preset.samples(seed)
            u = synthesize(preset.kernel, preset.truth, samples)
            obs = add_noise(u, sigma, seed)
            for config in methods:
                records.append(run_one(preset, config, sigma, seed, obs=obs))
    records.sort(key=RunRecord.sort_key)
    return records


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def format_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}i"


def _csv_row(r: RunRecord, include_timing: bool) -> str:
    wall = r.wall_time_ms if include_timing else 0.0
    vals = (
        r.preset,
        r.method,
        _fmt(r.sigma),
        str(r.seed),
        _fmt(r.location_error),
        _fmt(r.weight_error),
        _fmt(r.gamma_or_tol),
        _fmt(r.cond_v_minus),
        _fmt(r.svd_gap),
        _fmt(wall),
    )
    return ",".join(vals)


def emit_report(records, format: str, outdir, include_timing: bool = True) -> list:
    """Write records as csv, json, or plotdata files; returns written paths."""
    if not records:
        raise ValueError("no records to report")
    outdir = Path(outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        if format == "csv":
            path = outdir / "records.csv"
            lines = [",".join(CSV_COLUMNS)]
            lines += [_csv_row(r, include_timing) for r in records]
            path.write_text("\n".join(lines) + "\n")
            return [path]
        if format == "json":
            path = outdir / "records.json"
            objs = []
            for r in records:
                obj = {
                    "preset": r.preset,
                    "method": r.method,
                    "sigma": r.sigma,
                    "seed": r.seed,
                    "location_error": r.location_error,
                    "weight_error": r.weight_error,
                    "gamma_or_tol": r.gamma_or_tol,
                    "condV_minus": r.cond_v_minus,
                    "svd_gap": r.svd_gap,
                    "wall_time_ms": r.wall_time_ms if include_timing else 0.0,
                    "locations": r.locations,
                    "weights": r.weights,
                    "failed_stage": r.failed_stage,
                    "error": r.error,
                }
                objs.append(obj)
            path.write_text(json.dumps(objs, indent=1, allow_nan=True) + "\n")
            return [path]
        if format == "plotdata":
            return _emit_plotdata(records, outdir)
        raise ValueError(f"unknown report format {format!r}")
    except OSError as exc:
        raise OSError(f"failed writing report under {outdir}: {exc}") from exc


def _emit_plotdata(records, outdir: Path) -> list:
    paths = []
    presets_seen = {}
    for r in records:
        presets_seen.setdefault(r.preset, load_preset(r.preset))
    for pid, preset in sorted(presets_seen.items()):
        path = outdir / f"{pid}_truth.dat"
        lines = ["# loc_re loc_im weight_re weight_im"]
        for x, w in zip(preset.truth.locations, preset.truth.weights):
            lines.append(f"{x.real:.17g} {x.imag:.17g} {w.real:.17g} {w.imag:.17g}")
        path.write_text("\n".join(lines) + "\n")
        paths.append(path)
    groups = {}
    for r in records:
        groups.setdefault((r.preset, r.sigma, r.method), []).append(r)
    for (pid, sigma, method), recs in sorted(groups.items()):
        path = outdir / f"{pid}_sigma{sigma:g}_{method}.dat"
        lines = ["# seed loc_re loc_im weight_re weight_im"]
        for r in recs:
            for loc, w in zip(r.locations, r.weights):
                lines.append(
                    f"{r.seed} {loc[0]:.17g} {loc[1]:.17g} {w[0]:.17g} {w[1]:.17g}"
                )
        path.write_text("\n".join(lines) + "\n")
        paths.append(path)
    return paths


def make_method(
    name: str,
    n_x: int = 4,
    l: int | None = None,
    tol_factor: float = 1e-4,
    gamma: float | None = None,
    grid_size: int = 200,
) -> MethodConfig:
    variant = {v.value: v for v in Variant}.get(name)
    if variant is None:
        raise ValueError(f"unknown method {name!r}")
    return MethodConfig(
        variant=variant,
        n_x=n_x,
        l=l,
        tol_factor=tol_factor,
        gamma=gamma,
        lcurve_grid_size=grid_size,
    )

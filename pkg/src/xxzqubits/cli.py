"""Batch front door: JSON config in, CSV tables and a run manifest out."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .operators import (
    ChainSpec,
    CouplingSpec,
    OPEN,
    PERIODIC,
    build_chain_hamiltonian,
    build_interaction,
    total_sz,
)
from .spectra import eig_hermitian, find_level_crossings
from .effective import (
    axial_z_coefficient,
    effective_hamiltonian,
    extract_g,
    g_comparison,
)
from .dynamics import concurrence_trace, full_vs_effective
from .experiments import (
    INITIAL_STATES,
    check_period_scaling,
    critical_field_scaling,
    initial_state,
    sweep_concurrence,
)

SUBCOMMANDS = (
    "spectrum",
    "effective",
    "evolve",
    "sweep",
    "critical",
    "scaling",
    "fullcheck",
)

OUTPUT_ENV_VAR = "XXZQUBITS_OUTPUT"


class ConfigError(Exception):
    """Raised with a field-level message when the run config is invalid."""


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _expect(mapping: dict, key: str, kind, where: str, default=None, required=False):
    if key not in mapping:
        if required:
            raise ConfigError(f"{where}.{key}: missing required field")
        return default
    value = mapping[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise ConfigError(
            f"{where}.{key}: expected {getattr(kind, '__name__', kind)}, "
            f"got {type(value).__name__}"
        )
    return value


def _parse_chain(cfg: dict) -> ChainSpec:
    section = _expect(cfg, "chain", dict, "config", default={})
    n = _expect(section, "n_sites", int, "chain", required=True)
    boundary = _expect(section, "boundary", str, "chain", default=None)
    if boundary is not None and boundary not in (OPEN, PERIODIC):
        raise ConfigError(f"chain.boundary: must be '{OPEN}' or '{PERIODIC}'")
    try:
        return ChainSpec(
            n_sites=n,
            j=_expect(section, "j", float, "chain", default=1.0),
            delta=_expect(section, "delta", float, "chain", default=0.25),
            field=_expect(section, "field", float, "chain", default=0.0),
            boundary=boundary,
        )
    except ValueError as exc:
        raise ConfigError(f"chain: {exc}") from exc


def _parse_coupling(cfg: dict) -> CouplingSpec:
    section = _expect(cfg, "coupling", dict, "config", default={})
    try:
        return CouplingSpec(
            jp=_expect(section, "jp", float, "coupling", default=0.2),
            topology=_expect(section, "topology", str, "coupling", default="end"),
            convention=_expect(section, "convention", str, "coupling", default="pauli"),
            sites_a=tuple(_expect(section, "sites_a", list, "coupling", default=[])),
            sites_b=tuple(_expect(section, "sites_b", list, "coupling", default=[])),
        )
    except ValueError as exc:
        raise ConfigError(f"coupling: {exc}") from exc


def _parse_grid(cfg: dict, key: str, default: tuple[float, float, float]) -> np.ndarray:
    section = _expect(cfg, key, dict, "config", default=None)
    if section is None:
        start, stop, step = default
    else:
        start = _expect(section, "start", float, key, default=default[0])
        stop = _expect(section, "stop", float, key, default=default[1])
        step = _expect(section, "step", float, key, default=default[2])
    if step <= 0 or stop <= start:
        raise ConfigError(f"{key}: requires stop > start and step > 0")
    return np.arange(start, stop + 0.5 * step, step)


def _parse_initial(cfg: dict) -> str:
    label = _expect(cfg, "initial_state", str, "config", default="basis01")
    if label not in INITIAL_STATES:
        raise ConfigError(f"initial_state: unknown label {label!r}; use {INITIAL_STATES}")
    return label


def _parse_n_list(cfg: dict) -> list[int]:
    values = _expect(cfg, "n_list", list, "config", default=[2, 4, 6, 8])
    for v in values:
        if not isinstance(v, int) or v % 2 or v < 2:
            raise ConfigError("n_list: entries must be even integers >= 2")
    return values


def _parse_b_range(cfg: dict) -> tuple[float, float]:
    values = _expect(cfg, "b_range", list, "config", default=[0.0, 4.0])
    if len(values) != 2:
        raise ConfigError("b_range: expected [low, high]")
    lo, hi = float(values[0]), float(values[1])
    if hi <= lo:
        raise ConfigError("b_range: high must exceed low")
    return lo, hi


def _run_spectrum(cfg: dict, out: Path) -> list[str]:
    chain = _parse_chain(cfg)
    spectrum = eig_hermitian(build_chain_hamiltonian(chain))
    mz = total_sz(chain.n_sites)
    sectors = np.real(
        np.einsum("ij,ij->j", spectrum.eigenvectors.conj(), mz @ spectrum.eigenvectors)
    )
    rows = [
        (k, spectrum.eigenvalues[k], int(np.rint(sectors[k])))
        for k in range(spectrum.dim)
    ]
    write_csv(out / "spectrum.csv", ["index", "eigenvalue", "magnetization"], rows)
    return ["spectrum.csv"]


def _run_effective(cfg: dict, out: Path) -> list[str]:
    chain = _parse_chain(cfg)
    coupling = _parse_coupling(cfg)
    spectrum = eig_hermitian(build_chain_hamiltonian(chain))
    try:
        heff, excluded = effective_hamiltonian(
            spectrum, build_interaction(chain, coupling)
        )
    except ValueError as exc:
        raise ValueError(f"{exc} (field B={chain.field})") from exc
    rows = [
        (r, c, heff[r, c].real, heff[r, c].imag) for r in range(4) for c in range(4)
    ]
    write_csv(out / "heff.csv", ["row", "col", "real", "imag"], rows)
    fit = extract_g(heff)
    write_csv(
        out / "g_extraction.csv",
        ["g_diag", "g_offdiag", "residual", "g_z", "excluded_levels"],
        [(fit.g_diag, fit.g_offdiag, fit.residual, axial_z_coefficient(heff),
          len(excluded))],
    )
    comparison = g_comparison(chain, coupling.jp)
    write_csv(
        out / "g_comparison.csv",
        [
            "topology",
            "convention",
            "g_diag",
            "g_offdiag",
            "g_z",
            "residual",
            "residual_beyond_z",
            "reference",
            "x_preserving",
        ],
        [
            (
                row.topology,
                row.convention,
                row.g_diag,
                row.g_offdiag,
                row.g_z,
                row.residual,
                row.residual_beyond_z,
                row.reference,
                row.x_preserving,
            )
            for row in comparison
        ],
    )
    return ["heff.csv", "g_extraction.csv", "g_comparison.csv"]


def _run_evolve(cfg: dict, out: Path) -> list[str]:
    chain = _parse_chain(cfg)
    coupling = _parse_coupling(cfg)
    t_grid = _parse_grid(cfg, "t_grid", (0.0, 50.0, 0.05))
    spectrum = eig_hermitian(build_chain_hamiltonian(chain))
    try:
        heff, _ = effective_hamiltonian(spectrum, build_interaction(chain, coupling))
    except ValueError as exc:
        raise ValueError(f"{exc} (field B={chain.field})") from exc
    trace = concurrence_trace(heff, initial_state(_parse_initial(cfg)), t_grid)
    write_csv(
        out / "trace.csv",
        ["time", "concurrence"],
        zip(trace.times, trace.values),
    )
    return ["trace.csv"]


def _run_sweep(cfg: dict, out: Path, workers: int) -> list[str]:
    chain = _parse_chain(cfg)
    coupling = _parse_coupling(cfg)
    b_grid = _parse_grid(cfg, "b_grid", (0.0, 4.0, 0.02))
    t_grid = _parse_grid(cfg, "t_grid", (0.0, 50.0, 0.05))
    result = sweep_concurrence(
        chain, coupling, _parse_initial(cfg), b_grid, t_grid, workers=workers
    )
    rows = (
        (b, t, result.concurrence[i, k])
        for i, b in enumerate(result.b_values)
        for k, t in enumerate(result.times)
    )
    write_csv(out / "sweep.csv", ["field", "time", "concurrence"], rows)
    write_csv(
        out / "sweep_skipped.csv",
        ["field"],
        [(b,) for b in result.skipped],
    )
    return ["sweep.csv", "sweep_skipped.csv"]


def _run_critical(cfg: dict, out: Path) -> list[str]:
    chain = _parse_chain(cfg)
    scan = find_level_crossings(chain, _parse_b_range(cfg))
    write_csv(
        out / "critical_fields.csv",
        ["field", "sector_below", "sector_above"],
        [(c.field, c.sector_below, c.sector_above) for c in scan.crossings],
    )
    return ["critical_fields.csv"]


def _run_scaling(cfg: dict, out: Path) -> list[str]:
    coupling = _parse_coupling(cfg)
    n_list = _parse_n_list(cfg)
    b_range = _parse_b_range(cfg)
    delta = _expect(cfg, "delta", float, "config", default=0.25)
    point_rows, fit_rows, ratio_rows = [], [], []
    for boundary in (OPEN, PERIODIC):
        fit = critical_field_scaling(n_list, delta, boundary=boundary, b_range=b_range)
        for (inv_n, bc) in fit.points:
            point_rows.append((boundary, int(round(1 / inv_n)), inv_n, bc))
        fit_rows.append((boundary, fit.slope, fit.intercept, fit.max_residual))
        report = check_period_scaling(
            [n for n in n_list if n >= 4], delta, coupling, boundary=boundary,
            b_range=b_range,
        )
        for row in report.rows:
            ratio_rows.append(
                (
                    boundary,
                    row.n_sites,
                    row.field_below,
                    row.period_below,
                    row.field_above,
                    row.period_above,
                    row.ratio,
                    row.predicted,
                    row.within_tolerance,
                )
            )
    write_csv(
        out / "bc_points.csv",
        ["boundary", "n_sites", "inv_n", "critical_field"],
        point_rows,
    )
    write_csv(
        out / "bc_fit.csv",
        ["boundary", "slope", "intercept", "max_residual"],
        fit_rows,
    )
    write_csv(
        out / "period_ratios.csv",
        [
            "boundary",
            "n_sites",
            "field_below",
            "period_below",
            "field_above",
            "period_above",
            "ratio",
            "predicted",
            "within_tolerance",
        ],
        ratio_rows,
    )
    return ["bc_points.csv", "bc_fit.csv", "period_ratios.csv"]


def _run_fullcheck(cfg: dict, out: Path) -> list[str]:
    chain = _parse_chain(cfg)
    coupling = _parse_coupling(cfg)
    t_grid = _parse_grid(cfg, "t_grid", (0.0, 50.0, 0.05))
    try:
        trace_full, trace_eff, max_dev = full_vs_effective(
            chain, coupling, initial_state(_parse_initial(cfg)), t_grid
        )
    except ValueError as exc:
        raise ValueError(f"{exc} (field B={chain.field})") from exc
    write_csv(
        out / "fullcheck.csv",
        ["time", "concurrence_full", "concurrence_effective", "abs_deviation"],
        (
            (t, cf, ce, abs(cf - ce))
            for t, cf, ce in zip(trace_full.times, trace_full.values, trace_eff.values)
        ),
    )
    write_csv(out / "fullcheck_summary.csv", ["max_deviation"], [(max_dev,)])
    return ["fullcheck.csv", "fullcheck_summary.csv"]


def run(config: dict, output_dir: Path, workers: int, seed: int | None = None) -> dict:
    """Execute one subcommand; returns the manifest dictionary."""
    sub = _expect(config, "subcommand", str, "config", required=True)
    if sub not in SUBCOMMANDS:
        raise ConfigError(f"subcommand: unknown value {sub!r}; use one of {SUBCOMMANDS}")
    output_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    if sub == "spectrum":
        outputs = _run_spectrum(config, output_dir)
    elif sub == "effective":
        outputs = _run_effective(config, output_dir)
    elif sub == "evolve":
        outputs = _run_evolve(config, output_dir)
    elif sub == "sweep":
        outputs = _run_sweep(config, output_dir, workers)
    elif sub == "critical":
        outputs = _run_critical(config, output_dir)
    elif sub == "scaling":
        outputs = _run_scaling(config, output_dir)
    else:
        outputs = _run_fullcheck(config, output_dir)
    manifest = {
        "version": __version__,
        "config": config,
        "workers": workers,
        "seed": seed,
        "outputs": outputs,
        "wall_time_s": round(time.time() - started, 3),
    }
    with open(output_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a JSON object")
    # A previously written manifest can be replayed directly.
    if "subcommand" not in data and isinstance(data.get("config"), dict):
        data = data["config"]
    return data


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="xxzqubits",
        description="Spin-chain-mediated qubit entanglement: batch runner",
    )
    parser.add_argument("--config", required=True, help="path to a JSON run config")
    parser.add_argument("--output", help="output directory (overrides env and config)")
    parser.add_argument("--workers", type=int, default=None, help="worker processes")
    parser.add_argument(
        "--seed", type=int, default=None,
        help="seed recorded in the manifest (randomized tests only)",
    )
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        out = (
            args.output
            or os.environ.get(OUTPUT_ENV_VAR)
            or _expect(config, "output_dir", str, "config", default="out")
        )
        workers = args.workers
        if workers is None:
            workers = _expect(config, "workers", int, "config", default=1)
        if workers < 1:
            raise ConfigError("workers: must be >= 1")
        run(config, Path(out), workers, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

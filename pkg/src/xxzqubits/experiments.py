"""Parameter sweeps, period measurement and critical-field scaling reports."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .operators import ChainSpec, CouplingSpec, build_chain_hamiltonian, build_interaction
from .spectra import (
    DEGENERACY_TOL,
    CriticalFieldScan,
    eig_hermitian,
    find_level_crossings,
    ground_state,
)
from .effective import effective_hamiltonian
from .dynamics import ConcurrenceTrace, concurrence_trace

INITIAL_STATES = ("basis01", "bell_0110", "bell_0011")

PERIOD_RATIO_TOLERANCE = 0.20
_CROSSING_SKIP_FACTOR = 10.0


def initial_state(label: str) -> np.ndarray:
    """Two-qubit start vector: |01>, (|01>+|10>)/sqrt2 or (|00>+|11>)/sqrt2."""
    s = np.zeros(4, dtype=complex)
    if label == "basis01":
        s[1] = 1.0
    elif label == "bell_0110":
        s[1] = s[2] = 1.0 / np.sqrt(2.0)
    elif label == "bell_0011":
        s[0] = s[3] = 1.0 / np.sqrt(2.0)
    else:
        raise ValueError(f"unknown initial state {label!r}; use one of {INITIAL_STATES}")
    return s


@dataclass(frozen=True)
class SweepResult:
    """Concurrence over a (field, time) grid, plus the fields that had to be
    skipped because the chain ground state was (nearly) degenerate there."""

    b_values: np.ndarray
    times: np.ndarray
    concurrence: np.ndarray
    metadata: dict
    skipped: tuple[float, ...] = ()


def _sweep_row(args) -> np.ndarray:
    chain, coupling, psi0, times = args
    spectrum = eig_hermitian(build_chain_hamiltonian(chain))
    heff, _ = effective_hamiltonian(spectrum, build_interaction(chain, coupling))
    return concurrence_trace(heff, psi0, times).values


def sweep_concurrence(
    template: ChainSpec,
    coupling: CouplingSpec,
    initial: str,
    b_grid: np.ndarray,
    t_grid: np.ndarray,
    workers: int = 1,
) -> SweepResult:
    """Effective-model concurrence C(B, t) row by row over the field grid.

    Grid points within 10 degeneracy tolerances of a located crossing, or with
    a numerically degenerate chain ground state, are dropped and recorded.
    """
    b_grid = np.asarray(b_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    if b_grid.size == 0 or t_grid.size == 0:
        raise ValueError("grids must be nonempty")
    psi0 = initial_state(initial)

    scan = find_level_crossings(
        template, (float(b_grid.min()) - 1e-9, float(b_grid.max()) + 1e-9)
    )
    window = _CROSSING_SKIP_FACTOR * DEGENERACY_TOL

    kept: list[float] = []
    skipped: list[float] = []
    for b in b_grid:
        if any(abs(b - c) <= window for c in scan.fields):
            skipped.append(float(b))
            continue
        spectrum = eig_hermitian(build_chain_hamiltonian(template.replace_field(float(b))))
        if ground_state(spectrum)[2]:
            skipped.append(float(b))
            continue
        kept.append(float(b))
    if not kept:
        raise ValueError("every field grid point fell on a ground-state degeneracy")

    jobs = [
        (template.replace_field(b), coupling, psi0, t_grid)
        for b in kept
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(job) for job in jobs]

    metadata = {
        "chain": {
            "n_sites": template.n_sites,
            "j": template.j,
            "delta": template.delta,
            "boundary": template.boundary,
        },
        "coupling": {
            "jp": coupling.jp,
            "topology": coupling.topology,
            "convention": coupling.convention,
        },
        "initial_state": initial,
        "crossings": scan.fields,
        "skipped_fields": list(skipped),
    }
    return SweepResult(
        b_values=np.array(kept),
        times=t_grid,
        concurrence=np.vstack(rows),
        metadata=metadata,
        skipped=tuple(skipped),
    )


@dataclass(frozen=True)
class PeriodEstimate:
    period: float
    method: str
    confidence: float

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError("period must be positive")


def _minima_times(trace: ConcurrenceTrace, threshold: float) -> np.ndarray:
    below = trace.values < threshold
    if below.all():
        raise ValueError("trace is flat near zero; no oscillation to measure")
    reps = []
    i = 0
    n = below.size
    while i < n:
        if below[i]:
            j = i
            while j + 1 < n and below[j + 1]:
                j += 1
            k = i + int(np.argmin(trace.values[i : j + 1]))
            reps.append(trace.times[k])
            i = j + 1
        else:
            i += 1
    return np.asarray(reps)


def _spectral_period(trace: ConcurrenceTrace) -> float:
    values = trace.values - trace.values.mean()
    dt = float(trace.times[1] - trace.times[0])
    spectrum = np.abs(np.fft.rfft(values))
    freqs = np.fft.rfftfreq(values.size, dt)
    k = 1 + int(np.argmax(spectrum[1:]))
    return 1.0 / freqs[k]


def estimate_period(trace: ConcurrenceTrace, threshold: float = 1e-3) -> PeriodEstimate:
    """Oscillation period of a concurrence trace.

    The primary estimate is the mean spacing between near-zero minima (samples
    below ``threshold``, grouped into clusters); a discrete spectral peak
    serves as the cross-check and their relative disagreement is reported as
    the confidence figure.  Needs at least two full oscillations.
    """
    minima = _minima_times(trace, threshold)
    if minima.size < 3:
        raise ValueError(
            "trace must span at least two full oscillations; extend the time grid"
        )
    period = float(np.mean(np.diff(minima)))
    spectral = _spectral_period(trace)
    confidence = abs(period - spectral) / period
    return PeriodEstimate(period=period, method="zero_crossing", confidence=confidence)


@dataclass(frozen=True)
class PeriodScalingRow:
    n_sites: int
    field_below: float
    period_below: float
    field_above: float
    period_above: float
    ratio: float
    predicted: float
    within_tolerance: bool


@dataclass(frozen=True)
class PeriodScalingReport:
    delta: float
    coupling: CouplingSpec
    boundary: str | None
    rows: tuple[PeriodScalingRow, ...]


def _measured_period(
    chain: ChainSpec, coupling: CouplingSpec, samples: int = 8192
) -> float:
    spectrum = eig_hermitian(build_chain_hamiltonian(chain))
    heff, _ = effective_hamiltonian(spectrum, build_interaction(chain, coupling))
    beta = abs(complex(heff[1, 2]))
    if beta < 1e-12:
        raise ValueError(
            f"no entangling coupling at field {chain.field}; period undefined"
        )
    expected = np.pi / (2.0 * beta)
    t_grid = np.linspace(0.0, 3.25 * expected, samples)
    trace = concurrence_trace(heff, initial_state("basis01"), t_grid)
    return estimate_period(trace).period


def check_period_scaling(
    n_list: list[int],
    delta: float,
    coupling: CouplingSpec,
    boundary: str | None = None,
    b_range: tuple[float, float] = (0.0, 4.0),
) -> PeriodScalingReport:
    """Below- against above-crossing oscillation periods per chain size.

    For each even N the trace period is measured at the midpoints of the first
    two ground-state regions and their ratio is reported against the predicted
    value sqrt(N(N+1)), flagged when it agrees within 20%.
    """
    rows = []
    for n in n_list:
        if n % 2:
            raise ValueError("chain sizes must be even")
        template = ChainSpec(n, delta=delta, boundary=boundary)
        scan = find_level_crossings(template, b_range)
        if len(scan.crossings) < 2:
            raise ValueError(f"need two crossings for N={n} in {b_range}")
        bc1, bc2 = scan.fields[0], scan.fields[1]
        b_below = 0.5 * bc1
        b_above = 0.5 * (bc1 + bc2)
        t_below = _measured_period(template.replace_field(b_below), coupling)
        t_above = _measured_period(template.replace_field(b_above), coupling)
        ratio = t_below / t_above
        predicted = float(np.sqrt(n * (n + 1)))
        rows.append(
            PeriodScalingRow(
                n_sites=n,
                field_below=b_below,
                period_below=t_below,
                field_above=b_above,
                period_above=t_above,
                ratio=ratio,
                predicted=predicted,
                within_tolerance=bool(
                    abs(ratio / predicted - 1.0) <= PERIOD_RATIO_TOLERANCE
                ),
            )
        )
    return PeriodScalingReport(
        delta=delta, coupling=coupling, boundary=boundary, rows=tuple(rows)
    )


@dataclass(frozen=True)
class BcFit:
    """Least-squares line through the (1/N, first critical field) points."""

    points: tuple[tuple[float, float], ...]
    slope: float
    intercept: float
    max_residual: float


def critical_field_scaling(
    n_list: list[int],
    delta: float,
    boundary: str | None = None,
    b_range: tuple[float, float] = (0.0, 4.0),
) -> BcFit:
    """First critical field of each chain size, fitted linearly against 1/N."""
    if len(n_list) < 3:
        raise ValueError("need at least three chain sizes for a meaningful fit")
    points = []
    for n in n_list:
        if n % 2:
            raise ValueError("chain sizes must be even")
        template = ChainSpec(n, delta=delta, boundary=boundary)
        scan = find_level_crossings(template, b_range)
        if not scan.crossings:
            raise ValueError(f"no crossing found for N={n} in {b_range}")
        points.append((1.0 / n, scan.fields[0]))
    xs = np.array([p[0] for p in points])
    ys = np.array([p[1] for p in points])
    slope, intercept = np.polyfit(xs, ys, 1)
    residuals = ys - (slope * xs + intercept)
    return BcFit(
        points=tuple(points),
        slope=float(slope),
        intercept=float(intercept),
        max_residual=float(np.max(np.abs(residuals))),
    )


@dataclass(frozen=True)
class RegionReport:
    """Ground-state sector regions of the field axis."""

    scan: CriticalFieldScan
    regions: tuple[tuple[float, float, int], ...]

    @property
    def count(self) -> int:
        return len(self.regions)


def region_structure(template: ChainSpec, b_range: tuple[float, float]) -> RegionReport:
    """Partition of the field range into constant ground-sector regions."""
    scan = find_level_crossings(template, b_range)
    edges = [b_range[0], *scan.fields, b_range[1]]
    sectors = [c.sector_below for c in scan.crossings]
    if scan.crossings:
        sectors.append(scan.crossings[-1].sector_above)
    else:
        from .spectra import ground_sector

        sectors.append(ground_sector(template.replace_field(0.5 * sum(b_range))))
    regions = tuple(
        (edges[i], edges[i + 1], sectors[i]) for i in range(len(sectors))
    )
    return RegionReport(scan=scan, regions=regions)

"""Time-to-failure Monte Carlo, k-error failure counting and threshold
crossings.

Every trial draws from its own random stream keyed by the master seed, the
configuration and the trial index, and results are reduced in trial order
with compensated summation, so output does not depend on how trials are
spread over worker processes.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import _kernels as K
from .decoder import FAILURE_CLASSES, ConsistencyError
from .extraction import FAULT_GATE, FAULT_PAULI, FAULT_READOUT, build_schedule
from .lattice import CodeKind, CodeSpec, build_lattice
from .pauli_noise import ErrorModel, Extraction, RngStream, as_generator

DEFAULT_MAX_ROUNDS = 10**6
WORKERS_ENV = "SURFTHRESH_WORKERS"

_KIND_KEY = {CodeKind.TORIC: 0, CodeKind.SURFACE: 1}
_EXTRACTION_KEY = {Extraction.IDEAL: 0, Extraction.CIRCUIT: 1}
_TRACK = {"any": False, "x": True}


def _classes(mask: int) -> frozenset:
    return frozenset(name for bit, name in enumerate(FAILURE_CLASSES) if mask >> bit & 1)


def _p0_key(p0: float) -> int:
    return int(round(p0 * 10**12))


@dataclass(frozen=True)
class TrialOutcome:
    """``rounds`` is the failure round, or the cap for a censored trial."""

    rounds: int
    censored: bool
    failure_class: frozenset = field(default_factory=frozenset)

    @property
    def failure_round(self) -> int | None:
        return None if self.censored else self.rounds


def trial_stream(seed: int, spec: CodeSpec, model: ErrorModel, trial: int) -> RngStream:
    key = (_KIND_KEY[spec.kind], spec.distance, _p0_key(model.p0), _EXTRACTION_KEY[model.extraction], trial)
    return RngStream(int(seed), key)


def run_time_to_failure_trial(
    spec: CodeSpec,
    model: ErrorModel,
    seed,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    track: str = "any",
    faults: np.ndarray | None = None,
) -> TrialOutcome:
    """Simulate one logical lifetime.

    Ideal extraction: each round applies one memory step to every data qubit,
    measures ideally, decodes and corrects.  Circuit extraction: after every
    noisy round, the history plus one ideal final round is decoded on the
    side; the trial fails at the first round where that decode fails.

    ``track="x"`` only counts logical bit-flip (X) failures.  ``faults`` is
    an injection table for circuit-level runs (see ``extraction``).
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    if track not in _TRACK:
        raise ValueError(f"track must be one of {sorted(_TRACK)}")
    lattice = build_lattice(spec)
    rng = as_generator(seed)
    x_only = _TRACK[track]
    if model.extraction is Extraction.IDEAL:
        if faults is not None:
            raise ValueError("fault injection needs circuit-level extraction")
        t, mask = K.ideal_ttf(*K.ideal_args(lattice), model.p0, int(max_rounds), x_only, rng)
    else:
        f = np.zeros((0, 6), np.int64) if faults is None else np.asarray(faults, np.int64).reshape(-1, 6)
        t, mask = K.circuit_ttf(
            *K.circuit_args(lattice), model.p0, model.time_edge_weight, int(max_rounds), x_only, f, rng
        )
    if t == -2:
        raise ConsistencyError("matching failed on a decoding graph")
    if t == -1:
        return TrialOutcome(int(max_rounds), True)
    return TrialOutcome(int(t), False, _classes(int(mask)))


# sweeps


@dataclass(frozen=True)
class SweepRow:
    code: str
    d: int
    p0: float
    trials: int
    mean_ttf: float
    stderr: float
    censored: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple

    def for_distance(self, d: int) -> list[SweepRow]:
        return sorted((r for r in self.rows if r.d == d), key=lambda r: r.p0)


def summarize(rounds) -> tuple[float, float]:
    """Mean and standard error (sample std / sqrt(n)) with fsum."""
    vals = [float(r) for r in rounds]
    n = len(vals)
    mean = math.fsum(vals) / n
    if n < 2:
        return mean, float("nan")
    var = math.fsum((v - mean) ** 2 for v in vals) / (n - 1)
    return mean, math.sqrt(var / n)


def _chunk_worker(args):
    kind, d, p0, extraction, tw, seed, start, stop, max_rounds, track = args
    spec = CodeSpec(kind, d)
    model = ErrorModel(p0, extraction, tw)
    out = []
    for i in range(start, stop):
        o = run_time_to_failure_trial(spec, model, trial_stream(seed, spec, model, i).generator(), max_rounds, track)
        out.append((o.rounds, o.censored))
    return out


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer")
        return n
    return 1


def _map(fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _chunks(trials: int, workers: int) -> list[tuple[int, int]]:
    size = max(1, min(2000, -(-trials // max(1, 4 * workers))))
    return [(a, min(trials, a + size)) for a in range(0, trials, size)]


def run_sweep(
    kind,
    distances,
    p0s,
    trials: int,
    seed: int,
    extraction=Extraction.IDEAL,
    time_edge_weight: int = 1,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    workers: int | None = None,
    track: str = "any",
) -> SweepResult:
    """Mean time to failure for every (distance, p0) pair."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    kind = CodeKind(kind)
    extraction = Extraction(extraction)
    workers = default_workers() if workers is None else int(workers)
    tasks, owners = [], []
    for d in distances:
        CodeSpec(kind, d)
        for p0 in p0s:
            ErrorModel(p0, extraction, time_edge_weight)
            for a, b in _chunks(trials, workers):
                tasks.append((kind, d, float(p0), extraction, time_edge_weight, seed, a, b, max_rounds, track))
                owners.append((d, float(p0)))
    results = _map(_chunk_worker, tasks, workers)
    collected: dict = {}
    for key, res in zip(owners, results):
        collected.setdefault(key, []).extend(res)
    rows = []
    for d in distances:
        for p0 in p0s:
            res = collected[(d, float(p0))]
            mean, se = summarize(r for r, _ in res)
            cens = sum(1 for _, c in res if c)
            if cens:
                warnings.warn(f"{cens} of {trials} trials reached the {max_rounds}-round cap at d={d} p0={p0}")
            rows.append(SweepRow(kind.value, int(d), float(p0), trials, mean, se, cens))
    return SweepResult(tuple(rows))


# failure counting


@dataclass(frozen=True)
class FailureCountRow:
    k: int
    samples: int
    failures: int
    exhaustive: bool

    @property
    def r_k(self) -> float:
        return self.failures / self.samples if self.samples else 0.0

    @property
    def variance(self) -> float:
        """Variance of r_k; zero when every configuration was tested."""
        if self.exhaustive or self.samples == 0:
            return 0.0
        r = self.r_k
        return r * (1 - r) / self.samples


@dataclass(frozen=True)
class FailureCountTable:
    code: str
    d: int
    Q: int
    rows: dict = field(default_factory=dict)  # k -> FailureCountRow

    def ratio(self, k: int) -> float:
        return self.rows[k].r_k


def estimate_failure_ratios(spec: CodeSpec, k: int, n_samples: int, rng) -> FailureCountRow:
    """Fraction of k-bit-flip configurations that decode to a logical X
    failure under ideal extraction.

    When there are no more than ``n_samples`` configurations in total, all
    of them are tested and the ratio is exact.
    """
    lattice = build_lattice(spec)
    Q = lattice.n_data
    if not 0 <= k <= Q:
        raise ValueError(f"k must lie in [0, {Q}], got {k}")
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    args = K.counting_args(lattice)
    total = math.comb(Q, k)
    if total <= n_samples:
        configs = np.array(list(combinations(range(Q), k)), dtype=np.int64).reshape(total, k)
        fails = K.count_failures(configs, *args)
        samples, exhaustive = total, True
    else:
        fails = K.sample_failures(k, int(n_samples), *args, as_generator(rng))
        samples, exhaustive = int(n_samples), False
    if fails < 0:
        raise ConsistencyError("matching failed on a decoding graph")
    return FailureCountRow(k, samples, int(fails), exhaustive)


def _count_worker(args):
    kind, d, k, samples, seed = args
    spec = CodeSpec(kind, d)
    rng = RngStream(int(seed), (_KIND_KEY[spec.kind], d, k, 2)).generator()
    return estimate_failure_ratios(spec, k, samples, rng)


def run_count(kind, distances, ks, samples: int, seed: int, workers: int | None = None) -> list[tuple]:
    """Rows of (code, d, FailureCountRow); ``ks=None`` means every k."""
    kind = CodeKind(kind)
    workers = default_workers() if workers is None else int(workers)
    tasks = []
    for d in distances:
        Q = build_lattice(CodeSpec(kind, d)).n_data
        for k in range(Q + 1) if ks is None else ks:
            if not 0 <= k <= Q:
                raise ValueError(f"k={k} outside [0, {Q}] for d={d}")
            tasks.append((kind, d, int(k), int(samples), seed))
    results = _map(_count_worker, tasks, workers)
    return [(kind.value, t[1], r) for t, r in zip(tasks, results)]


def failure_table(spec: CodeSpec, samples: int, seed: int, ks=None, workers: int | None = None) -> FailureCountTable:
    rows = run_count(spec.kind, [spec.distance], ks, samples, seed, workers)
    Q = build_lattice(spec).n_data
    return FailureCountTable(spec.kind.value, spec.distance, Q, {r.k: r for _, _, r in rows})


def _binom_weights(Q: int, p: float) -> list[float]:
    return [math.comb(Q, k) * p**k * (1 - p) ** (Q - k) for k in range(Q + 1)]


def logical_error_rate(table: FailureCountTable, p0: float) -> float:
    """Bit-flip logical error rate per round from the failure ratios:
    sum over k of C(Q, k) r_k p^k (1 - p)^(Q - k) with p = 2 p0 / 3.

    Values of k missing from the table contribute nothing.
    """
    if not 0.0 <= p0 <= 1.0:
        raise ValueError(f"p0 must lie in [0, 1], got {p0}")
    wts = _binom_weights(table.Q, 2.0 * p0 / 3.0)
    return math.fsum(wts[k] * row.r_k for k, row in table.rows.items())


def logical_error_rate_stderr(table: FailureCountTable, p0: float) -> float:
    wts = _binom_weights(table.Q, 2.0 * p0 / 3.0)
    return math.sqrt(math.fsum(wts[k] ** 2 * row.variance for k, row in table.rows.items()))


# crossings


@dataclass(frozen=True)
class Crossing:
    found: bool
    p0: float | None = None
    stderr: float | None = None
    bracket: tuple | None = None


def _log_diff(a: SweepRow, b: SweepRow) -> tuple[float, float]:
    f = math.log(a.mean_ttf) - math.log(b.mean_ttf)
    var = 0.0
    for r in (a, b):
        if r.stderr == r.stderr and r.mean_ttf > 0:
            var += (r.stderr / r.mean_ttf) ** 2
    return f, var


def find_crossing(sweep_a, sweep_b) -> Crossing:
    """Where log mean TTF of the two sweeps cross, by linear interpolation
    between adjacent grid points; first sign change wins."""
    rows_a = {r.p0: r for r in sweep_a}
    rows_b = {r.p0: r for r in sweep_b}
    grid = sorted(set(rows_a) & set(rows_b))
    if len(grid) < 2:
        return Crossing(False)
    diffs = [_log_diff(rows_a[p], rows_b[p]) for p in grid]
    for i in range(len(grid) - 1):
        f0, v0 = diffs[i]
        f1, v1 = diffs[i + 1]
        if f0 * f1 < 0:
            h = grid[i + 1] - grid[i]
            delta = f1 - f0
            p = grid[i] + h * (-f0) / delta
            se = h * math.sqrt(f1 * f1 * v0 + f0 * f0 * v1) / delta**2
            return Crossing(True, p, se, (grid[i], grid[i + 1]))
        if f1 == 0 and f0 != 0:
            for f2, _ in diffs[i + 2 :]:
                if f2 != 0:
                    if f2 * f0 < 0:
                        return Crossing(True, grid[i + 1], 0.0, (grid[i], grid[i + 1]))
                    break
    return Crossing(False)


# single-fault injection


def enumerate_single_faults(spec: CodeSpec, rounds=(1, 2)) -> np.ndarray:
    """Every single circuit-level fault (one location, one Pauli outcome) in
    the given rounds, as rows of an injection table."""
    lattice = build_lattice(spec)
    sch = build_schedule(lattice)
    nd, nz, nx = sch.n_data, sch.n_z, sch.n_x
    rows = []
    for r in rounds:
        for a in range(nd, nd + nz):
            rows.append((r, 1, FAULT_PAULI, a, -1, 1))  # prepared |1>
        for a in range(nd + nz, nd + nz + nx):
            rows.append((r, 1, FAULT_PAULI, a, -1, 2))  # prepared |->
        for step in (1, 6):
            for q in range(nd):
                for code in (1, 2, 3):
                    rows.append((r, step, FAULT_PAULI, q, -1, code))
        for s in range(4):
            for g in range(sch.n_gates[s]):
                c, t = sch.gates[s, g]
                for code in range(1, 16):
                    rows.append((r, s + 2, FAULT_GATE, c, t, code))
            for i in range(sch.n_idle[s]):
                for code in (1, 2, 3):
                    rows.append((r, s + 2, FAULT_PAULI, sch.idle[s, i], -1, code))
        for a in range(nd, nd + nz + nx):
            rows.append((r, 6, FAULT_READOUT, a, -1, 0))
    return np.array(rows, dtype=np.int64).reshape(-1, 6)


def single_fault_failures(spec: CodeSpec, rounds=(1, 2), check_rounds: int = 3, time_edge_weight: int = 1):
    """Faults that, alone in an otherwise noiseless circuit-level run, cause
    a logical failure at some check up to round ``check_rounds``."""
    model = ErrorModel(0.0, Extraction.CIRCUIT, time_edge_weight)
    rng = np.random.Generator(np.random.Philox(0))
    failing = []
    for row in enumerate_single_faults(spec, rounds):
        o = run_time_to_failure_trial(spec, model, rng, check_rounds, faults=row.reshape(1, 6))
        if not o.censored:
            failing.append((tuple(int(v) for v in row), o))
    return failing

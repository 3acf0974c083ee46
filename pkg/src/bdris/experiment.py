"""Monte Carlo harness: scenario sweeps over sizes, trials, architectures.

One channel pair is drawn per (size, trial) from its own derived seed and
shared by every architecture, so architectures see paired trials.  Records
are a pure function of the configuration: execution order and worker count
never change a byte of the output.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

import numpy as np

from .adversarial import is_tc_adversarial
from .architecture import ArchitectureSpec, parse_arch
from .channel import (
    ChannelPair,
    GOLDEN_GAMMA,
    Rng,
    default_swap_extent,
    gen_gc_adversarial,
    gen_gc_favorable,
    gen_los,
    gen_rayleigh,
    gen_tc_adversarial,
    splitmix64,
)
from .errors import InputError
from .optimize import DEFAULT_RANK_RTOL, optimize

SCENARIOS = ("rayleigh", "gc_favorable", "gc_adversarial", "tc_adversarial", "los")
DEFAULT_SIZES = (8, 16, 24, 32, 40, 48, 56, 64)
DEFAULT_TRIALS = 1000
# Scenario generators with a group structure and their default group sizes.
_DEFAULT_GROUP_SIZE = {"gc_favorable": 2, "gc_adversarial": 4}

_MASK64 = (1 << 64) - 1
_TRIAL_LANE = 0xBF58476D1CE4E5B9

RECORD_HEADER = "scenario,n,arch,trial,seed,p_r,p_bar_full,ratio_full,residual_norm,consistent"
SUMMARY_HEADER = "scenario,n,arch,trials,mean_ratio,std_ratio,min_ratio,max_ratio,consistent_fraction"


def mix64(seed: int, size_index: int, trial_index: int) -> int:
    """Derived per-trial seed: one avalanche of seed XOR the two lane words."""
    z = (int(seed) ^ (size_index * GOLDEN_GAMMA) ^ (trial_index * _TRIAL_LANE)) & _MASK64
    return splitmix64(z)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep depends on; records are a pure function of this."""

    scenario: str
    sizes: tuple[int, ...] = DEFAULT_SIZES
    trials: int = DEFAULT_TRIALS
    archs: tuple[str, ...] = ("sc", "tc")
    seed: int = 0
    z0: float = 50.0
    q_override: int | None = None
    group_size: int | None = None
    check_membership: bool = False

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "archs", tuple(self.archs))


@dataclass(frozen=True)
class TrialRecord:
    """One (scenario, size, architecture, trial) outcome."""

    scenario: str
    n: int
    arch: str
    trial: int
    seed: int
    p_r: float
    p_bar_full: float
    ratio_full: float
    residual_norm: float
    consistent: bool
    in_a: bool | None = None


@dataclass(frozen=True)
class SummaryRow:
    """Aggregate of ratio_full over one (scenario, n, arch) cell."""

    scenario: str
    n: int
    arch: str
    trials: int
    mean_ratio: float
    std_ratio: float
    min_ratio: float
    max_ratio: float
    consistent_fraction: float


def resolve_archs(config: ExperimentConfig) -> dict[int, list[ArchitectureSpec]]:
    """Parse every architecture label for every size, failing up front."""
    if not config.sizes:
        raise InputError("at least one size is required")
    if not config.archs:
        raise InputError("at least one architecture is required")
    if config.trials < 1:
        raise InputError(f"trials must be positive, got {config.trials}")
    if config.scenario not in SCENARIOS:
        raise InputError(f"unknown scenario {config.scenario!r}; choose from {SCENARIOS}")
    resolved = {}
    for n in config.sizes:
        if n < 1:
            raise InputError(f"sizes must be positive, got {n}")
        resolved[n] = [parse_arch(label, n) for label in config.archs]
        _validate_scenario_params(config, n)
    return resolved


def run_experiment(config: ExperimentConfig, threads: int = 1) -> list[TrialRecord]:
    """All trial records, ordered by (size, trial, arch position)."""
    archs_by_size = resolve_archs(config)
    if threads < 1:
        raise InputError(f"thread count must be positive, got {threads}")
    tasks = [(si, n, t) for si, n in enumerate(config.sizes) for t in range(config.trials)]

    def run_task(task) -> list[TrialRecord]:
        si, n, t = task
        seed = mix64(config.seed, si, t)
        rng = Rng(seed)
        pair, label = _draw_pair(config, n, rng)
        in_a = is_tc_adversarial(pair).in_a if config.check_membership else None
        records = []
        for arch_label, spec in zip(config.archs, archs_by_size[n]):
            result = optimize(pair, spec, config.z0, DEFAULT_RANK_RTOL)
            records.append(TrialRecord(
                scenario=label,
                n=n,
                arch=arch_label,
                trial=t,
                seed=seed,
                p_r=result.p_r,
                p_bar_full=result.p_bar_full,
                ratio_full=result.ratio_full,
                residual_norm=result.residual_norm,
                consistent=result.consistent,
                in_a=in_a,
            ))
        return records

    if threads == 1:
        chunks = [run_task(task) for task in tasks]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(run_task, tasks))
    return [record for chunk in chunks for record in chunk]


def summarize(records) -> list[SummaryRow]:
    """Mean/population-std aggregates per (scenario, n, arch), in record order."""
    cells: dict[tuple, list[TrialRecord]] = {}
    for record in records:
        cells.setdefault((record.scenario, record.n, record.arch), []).append(record)
    rows = []
    for (scenario, n, arch), group in cells.items():
        ratios = np.array([r.ratio_full for r in group])
        rows.append(SummaryRow(
            scenario=scenario,
            n=n,
            arch=arch,
            trials=len(group),
            mean_ratio=float(ratios.mean()),
            std_ratio=float(ratios.std()),
            min_ratio=float(ratios.min()),
            max_ratio=float(ratios.max()),
            consistent_fraction=float(np.mean([r.consistent for r in group])),
        ))
    return rows


def write_records_csv(records, fp) -> None:
    """Records CSV with shortest round-trip floats; stable byte for byte.

    The in_a column appears only when membership was recorded.
    """
    with_membership = any(r.in_a is not None for r in records)
    fp.write(RECORD_HEADER + (",in_a" if with_membership else "") + "\n")
    for r in records:
        row = [r.scenario, str(r.n), r.arch, str(r.trial), str(r.seed), _fmt(r.p_r),
               _fmt(r.p_bar_full), _fmt(r.ratio_full), _fmt(r.residual_norm), _bool(r.consistent)]
        if with_membership:
            row.append("" if r.in_a is None else _bool(r.in_a))
        fp.write(",".join(row) + "\n")


def write_summary_csv(rows, fp) -> None:
    fp.write(SUMMARY_HEADER + "\n")
    for r in rows:
        fp.write(",".join([
            r.scenario, str(r.n), r.arch, str(r.trials), _fmt(r.mean_ratio),
            _fmt(r.std_ratio), _fmt(r.min_ratio), _fmt(r.max_ratio),
            _fmt(r.consistent_fraction),
        ]) + "\n")


def _draw_pair(config: ExperimentConfig, n: int, rng: Rng) -> tuple[ChannelPair, str]:
    scenario = config.scenario
    if scenario == "rayleigh":
        return gen_rayleigh(n, rng), scenario
    if scenario == "los":
        return gen_los(n, rng), scenario
    if scenario == "gc_favorable":
        return gen_gc_favorable(n, _group_size(config, scenario), rng), scenario
    if scenario == "gc_adversarial":
        return gen_gc_adversarial(n, _group_size(config, scenario), rng), scenario
    q = config.q_override if config.q_override is not None else default_swap_extent(n)
    # the swap extent is part of the scenario identity, so label it
    return gen_tc_adversarial(n, rng, q), f"tc_adversarial:q={q}"


def _group_size(config: ExperimentConfig, scenario: str) -> int:
    if config.group_size is not None:
        return config.group_size
    return _DEFAULT_GROUP_SIZE[scenario]


def _validate_scenario_params(config: ExperimentConfig, n: int) -> None:
    if config.scenario in _DEFAULT_GROUP_SIZE:
        gs = _group_size(config, config.scenario)
        if gs < 1 or n % gs:
            raise InputError(f"group size {gs} must divide every size; n = {n} fails")
    if config.scenario == "tc_adversarial":
        if n < 2:
            raise InputError("tc_adversarial needs sizes >= 2")
        q = config.q_override
        if q is not None and (q % 2 == 0 or not 1 <= q <= n - 1):
            raise InputError(f"q = {q} must be odd and within [1, {n - 1}] for every size")


def _fmt(x: float) -> str:
    return repr(float(x))


def _bool(flag: bool) -> str:
    return "true" if flag else "false"

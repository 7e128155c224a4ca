"""Monte Carlo experiment harness.

An experiment sweeps one scenario knob (users per cell, or cell radius)
and reports, per swept value, the mean number of unserved users per
sub-frame under two schedulers:

* SC: no coordination, every cell picks the PRB best for its own
  primary users, and users only listen to their primary cell.
* MC: the greedy cross-cell assignment, and users decode from any cell.

Each swept point averages over ``trials`` independent user placements
times ``subframes`` independent fading draws per placement.  Randomness
is keyed by (point index, trial, sub-frame) through SeedSequence spawn
keys, so every sample is reproducible in isolation and results do not
depend on execution order.
"""

from __future__ import annotations

import dataclasses
import json
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .coverage import CoverageInstance, InstanceError
from .scenario import (
    ChannelParams,
    DEFAULT_STREAM_RATE_BPS,
    Scenario,
    StreamSpec,
    derive_instance,
    generate_scenario,
    sample_rates,
)
from .solvers import solve_exact, solve_greedy, solve_sc_baseline

DEFAULT_USER_SWEEP = (100, 125, 150, 175, 200, 225, 250)
DEFAULT_RADIUS_SWEEP = (200, 250, 300, 350, 400)


@dataclass(frozen=True)
class ExperimentConfig:
    """Knobs shared by every point of a sweep."""

    num_cells: int = 7
    radius_m: float = 300.0
    users_per_cell: int = 175
    num_prbs: int = 4
    subframes: int = 100
    trials: int = 20
    stream_rate_bps: float = DEFAULT_STREAM_RATE_BPS
    channel: ChannelParams = field(default_factory=ChannelParams)
    seed: int = 0

    def __post_init__(self):
        if self.num_cells not in (1, 7, 19):
            raise ValueError("num_cells must be 1, 7 or 19")
        for name in ("users_per_cell", "num_prbs", "subframes", "trials"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.radius_m <= 0:
            raise ValueError("radius_m must be > 0")
        if self.stream_rate_bps <= 0:
            raise ValueError("stream_rate_bps must be > 0")


@dataclass(frozen=True)
class RawSample:
    """Unserved counts of one (placement, fading draw) sample."""

    value: float
    trial: int
    subframe: int
    unserved_sc: int
    unserved_mc: int
    unserved_exact: int | None = None


@dataclass(frozen=True)
class SweepPoint:
    """Mean and population std-dev of unserved users at one swept value,
    over ``samples`` = trials x subframes draws."""

    value: float
    unserved_sc: float
    unserved_mc: float
    std_sc: float
    std_mc: float
    samples: int
    trials: int
    unserved_exact: float | None = None
    std_exact: float | None = None


@dataclass(frozen=True)
class SweepResult:
    axis: str
    config: ExperimentConfig
    points: tuple[SweepPoint, ...]
    raw: tuple[RawSample, ...] = ()


def run_subframe(
    scenario: Scenario,
    params: ChannelParams,
    stream: StreamSpec,
    subframe: int,
    rng,
    num_prbs: int = 4,
) -> tuple[int, int]:
    """Sample one sub-frame and count unserved users (MC greedy, SC).

    Draws the rates for ``subframe`` from ``rng``, thresholds them into
    a coverage instance, then runs the greedy cross-cell solver for the
    MC count and the per-cell baseline for the SC count.
    """
    realization = sample_rates(scenario, params, subframe, rng, num_prbs)
    instance = derive_instance(scenario, realization, stream)
    mc, sc, _ = _evaluate_instance(instance, with_exact=False)
    return mc, sc


def _evaluate_instance(
    instance: CoverageInstance,
    with_exact: bool,
    exact_budget: int = 10_000_000,
) -> tuple[int, int, int | None]:
    m = instance.num_users
    unserved_mc = m - solve_greedy(instance).objective
    unserved_sc = m - solve_sc_baseline(instance).objective
    unserved_exact = None
    if with_exact:
        unserved_exact = m - solve_exact(instance, budget=exact_budget).objective
    return unserved_mc, unserved_sc, unserved_exact


def _point_config(config: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    if axis == "users":
        return dataclasses.replace(config, users_per_cell=int(value))
    if axis == "radius":
        return dataclasses.replace(config, radius_m=float(value))
    raise ValueError(f"axis must be 'users' or 'radius', got {axis!r}")


def run_sweep(
    config: ExperimentConfig,
    axis: str,
    values: Sequence[float] | None = None,
    with_exact: bool = False,
    exact_budget: int = 10_000_000,
    collect_raw: bool = False,
    progress: Callable[[str], None] | None = None,
) -> SweepResult:
    """Run the Monte Carlo sweep along ``axis``.

    ``values`` must be strictly increasing and defaults to
    DEFAULT_USER_SWEEP or DEFAULT_RADIUS_SWEEP.  With ``with_exact``
    every sub-frame also gets the brute-force optimum (only feasible
    while num_prbs ** num_cells stays within ``exact_budget``).  With
    ``collect_raw`` the per-sample counts are kept on the result so the
    reported means can be recomputed from them.
    """
    if values is None:
        values = DEFAULT_USER_SWEEP if axis == "users" else DEFAULT_RADIUS_SWEEP
    values = tuple(float(v) for v in values)
    if not values:
        raise ValueError("need at least one sweep value")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"sweep values must be strictly increasing: {values}")
    params = config.channel
    stream = StreamSpec(rate_bps=config.stream_rate_bps)
    points = []
    raw: list[RawSample] = []
    for pi, value in enumerate(values):
        pc = _point_config(config, axis, value)
        sc_counts = np.empty(pc.trials * pc.subframes, dtype=np.int64)
        mc_counts = np.empty_like(sc_counts)
        exact_counts = np.empty_like(sc_counts) if with_exact else None
        i = 0
        for trial in range(pc.trials):
            placement_rng = np.random.default_rng(
                np.random.SeedSequence(pc.seed, spawn_key=(pi, trial, 0))
            )
            scenario = generate_scenario(
                pc.num_cells, pc.radius_m, pc.users_per_cell, placement_rng
            )
            for t in range(pc.subframes):
                fading_rng = np.random.default_rng(
                    np.random.SeedSequence(pc.seed, spawn_key=(pi, trial, 1, t))
                )
                realization = sample_rates(scenario, params, t, fading_rng,
                                           num_prbs=pc.num_prbs)
                instance = derive_instance(scenario, realization, stream)
                mc, sc, exact = _evaluate_instance(
                    instance, with_exact, exact_budget
                )
                mc_counts[i] = mc
                sc_counts[i] = sc
                if with_exact:
                    exact_counts[i] = exact
                i += 1
                if collect_raw:
                    raw.append(RawSample(
                        value=value, trial=trial, subframe=t,
                        unserved_sc=sc, unserved_mc=mc, unserved_exact=exact,
                    ))
        points.append(SweepPoint(
            value=value,
            unserved_sc=float(sc_counts.mean()),
            unserved_mc=float(mc_counts.mean()),
            std_sc=float(sc_counts.std()),
            std_mc=float(mc_counts.std()),
            samples=i,
            trials=pc.trials,
            unserved_exact=float(exact_counts.mean()) if with_exact else None,
            std_exact=float(exact_counts.std()) if with_exact else None,
        ))
        if progress is not None:
            progress(f"{axis}={value:g}: SC={points[-1].unserved_sc:.3f} "
                     f"MC={points[-1].unserved_mc:.3f}")
    return SweepResult(axis=axis, config=config, points=tuple(points),
                       raw=tuple(raw))


def _fmt_float(x: float) -> str:
    # repr(float) switches to exponent notation below 1e-4; the CSVs
    # must stay plain decimal.
    x = float(x)
    r = repr(x)
    if "e" in r or "E" in r:
        return np.format_float_positional(x, trim="0")
    return r


def _fmt_value(x: float) -> str:
    x = float(x)
    if x.is_integer():
        return str(int(x))
    return _fmt_float(x)


def write_csv(result: SweepResult, path, axis: str | None = None) -> None:
    """Write the sweep means as CSV: one row per swept value.

    Header is ``users,SC,MC`` or ``radius,SC,MC`` depending on the
    axis, plus ``,EXACT`` when the sweep ran the brute-force solver.
    ``axis`` defaults to the axis the sweep ran over.
    """
    if not result.points:
        raise ValueError("sweep result has no points")
    if axis is None:
        axis = result.axis
    elif axis != result.axis:
        raise ValueError(
            f"axis {axis!r} does not match the sweep axis {result.axis!r}"
        )
    with_exact = result.points[0].unserved_exact is not None
    header = f"{axis},SC,MC"
    if with_exact:
        header += ",EXACT"
    lines = [header]
    for p in result.points:
        row = (f"{_fmt_value(p.value)},{_fmt_float(p.unserved_sc)},"
               f"{_fmt_float(p.unserved_mc)}")
        if with_exact:
            row += f",{_fmt_float(p.unserved_exact)}"
        lines.append(row)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_raw_csv(result: SweepResult, path) -> None:
    """Per-sample dump from which the means in the main CSV can be
    recomputed."""
    if not result.raw:
        raise ValueError("sweep was run without collect_raw")
    with_exact = result.raw[0].unserved_exact is not None
    header = f"{result.axis},trial,subframe,SC,MC"
    if with_exact:
        header += ",EXACT"
    lines = [header]
    for s in result.raw:
        row = (f"{_fmt_value(s.value)},{s.trial},{s.subframe},"
               f"{s.unserved_sc},{s.unserved_mc}")
        if with_exact:
            row += f",{s.unserved_exact}"
        lines.append(row)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_meta(result: SweepResult, csv_path) -> None:
    """Sidecar JSON describing how the CSV next to it was produced."""
    point_stats = []
    for p in result.points:
        entry = {
            "value": p.value,
            "mean_sc": p.unserved_sc,
            "mean_mc": p.unserved_mc,
            "std_sc": p.std_sc,
            "std_mc": p.std_mc,
            "samples": p.samples,
            "trials": p.trials,
        }
        if p.unserved_exact is not None:
            entry["mean_exact"] = p.unserved_exact
            entry["std_exact"] = p.std_exact
        point_stats.append(entry)
    meta = {
        "axis": result.axis,
        "config": dataclasses.asdict(result.config),
        "averaging": "unweighted mean of per-subframe unserved-user counts "
                     "over trials (fresh user placement each) x subframes "
                     "(fresh fading each) samples",
        "columns": {
            "SC": "uncoordinated per-cell choice, primary cell only",
            "MC": "greedy cross-cell choice, decode from any cell",
        },
        "points": point_stats,
    }
    if result.points[0].unserved_exact is not None:
        meta["columns"]["EXACT"] = "brute-force optimal cross-cell choice"
    path = Path(str(csv_path) + ".meta.json")
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def instance_to_dict(instance: CoverageInstance) -> dict:
    """JSON-ready dict: M users, C cells, N PRB sets per cell."""
    return {
        "M": instance.num_users,
        "C": instance.num_cells,
        "N": instance.prbs_per_cell,
        "collections": [[sorted(s) for s in cell] for cell in instance.collections],
        "primary": [int(p) for p in instance.primary_cell],
    }


def instance_from_dict(data: dict) -> CoverageInstance:
    try:
        m = int(data["M"])
        c = int(data["C"])
        n = int(data["N"])
        collections = data["collections"]
        primary = data["primary"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"bad instance document: {exc}") from exc
    if len(collections) != c:
        raise InstanceError(
            f"C={c} but collections lists {len(collections)} cells"
        )
    for i, cell in enumerate(collections):
        if len(cell) != n:
            raise InstanceError(
                f"N={n} but cell {i} lists {len(cell)} PRB sets"
            )
    return CoverageInstance(num_users=m, collections=collections,
                            primary_cell=primary)


def load_instance(path) -> CoverageInstance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def dump_instance(instance: CoverageInstance, path) -> None:
    Path(path).write_text(
        json.dumps(instance_to_dict(instance), indent=2) + "\n",
        encoding="utf-8",
    )


def random_instance(
    rng,
    num_users: int = 30,
    num_cells: int = 4,
    num_prbs: int = 3,
    density: float = 0.3,
) -> CoverageInstance:
    """Random coverage instance; membership entries are i.i.d. Bernoulli."""
    rng = np.random.default_rng(rng)
    membership = rng.random((num_cells, num_prbs, num_users)) < density
    primary = rng.integers(0, num_cells, size=num_users)
    return CoverageInstance.from_membership(membership, primary)

"""Variable-trajectory analysis and ratio sweeps.

Under descent from a near-center start, individual coordinates trace a small
set of recurring shapes. This module checks the starting-slope law — the
first update moves variable k by η·C_k/4, where C_k is the number of clauses
containing k, so initial slopes are quantized in units of η/4 — classifies
trajectories into the observed families, and sweeps the clauses-to-variables
ratio r = M/N to locate the satisfiability crossover (asymptotically near
r ≈ 0.62 for random instances).

Trajectory families (labels used throughout):

    I         monotone growth to 1
    II-up/-down   rises, dwells on a plateau near 2/3, then commits to 1 or 0
    III-up/-down  rises out of the 1/2 band, returns and dwells near 1/2
                  before splitting to 1 or 0
    IV        rises, then reverses and decays to 0
    V         stationary — in particular every variable in no clause
    Irregular anything else

The thresholds that turn these qualitative shapes into a decision procedure
live in ClassifierConfig and are deliberately exposed: they are calibration,
not theory.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cost import CostFunction
from .instance import ORACLE_CAP, brute_force_oracle, generate_instance
from .solver import (
    SolverConfig,
    Trajectory,
    config_with,
    derive_run_seed,
    mix64,
    rerun_with_trajectory,
    solve_with_restarts,
)

FAMILIES = ("I", "II-up", "II-down", "III-up", "III-down", "IV", "V", "Irregular")


@dataclass
class ClassifierConfig:
    high: float = 0.99            # "ends at 1" threshold
    low: float = 0.01             # "ends at 0" threshold
    plateau_band: float = 0.05    # half-width of a plateau band
    plateau_frac: float = 0.10    # dwell fraction that counts as a plateau
    rise_threshold: float = 0.6   # how high a flow must get to count as risen
    monotone_slack: float = 0.01  # cumulative reversal tolerated as monotone
    stationary_tol: float = 1e-12


_DEFAULT_CLASSIFIER = ClassifierConfig()


@dataclass(frozen=True)
class SlopeCheck:
    observed: np.ndarray   # first recorded displacement per variable
    predicted: np.ndarray  # η·C_k/4
    ok: np.ndarray         # |observed − predicted| ≤ 0.1·η


def initial_slope_check(trajectory: Trajectory, eta: float, clause_degree) -> SlopeCheck:
    """Compare each variable's first displacement, snapshot(2) − snapshot(1),
    against the predicted η·C_k/4. The 0.1·η tolerance absorbs the start
    point sitting near, not at, the exact center. Requires the trajectory to
    have recorded iterations 1 and 2 (stride 1 near the start)."""
    try:
        x1 = trajectory.snapshot_at(1)
        x2 = trajectory.snapshot_at(2)
    except KeyError as e:
        raise ValueError(f"trajectory lacks the early snapshots needed: {e}") from None
    degree = np.asarray(clause_degree, dtype=np.float64)
    observed = x2 - x1
    predicted = eta * degree / 4.0
    ok = np.abs(observed - predicted) <= 0.1 * eta
    return SlopeCheck(observed, predicted, ok)


def slope_spectrum(trajectory: Trajectory, eta: float) -> np.ndarray:
    """First displacements in units of η/4. Clusters on the integers
    0..M — the discrete spectrum of starting slopes."""
    try:
        x1 = trajectory.snapshot_at(1)
        x2 = trajectory.snapshot_at(2)
    except KeyError as e:
        raise ValueError(f"trajectory lacks the early snapshots needed: {e}") from None
    return (x2 - x1) / (eta / 4.0)


def classify_flows(trajectory: Trajectory, config: ClassifierConfig = _DEFAULT_CLASSIFIER):
    """Assign one family label per variable from the sampled trajectory.

    Decision order: V (stationary), III (return to the 1/2 band after an
    excursion above it), II (plateau near 2/3 after rising), I (monotone to
    1), IV (rose then fell to 0), else Irregular. III is tested before II
    because a splitting flow also spends time near 2/3 on its way out."""
    s = trajectory.snapshots
    if s.shape[0] < 3:
        raise ValueError("need at least 3 snapshots to classify flows")
    t, n = s.shape
    cfg = config
    start, final = s[0], s[-1]
    labels = np.full(n, "Irregular", dtype=object)
    assigned = np.zeros(n, dtype=bool)

    deviation = np.max(np.abs(s - start), axis=0)
    ends_up = final >= cfg.high
    ends_down = final <= cfg.low
    peak = s.max(axis=0)

    above_half = s > 0.5 + cfg.plateau_band
    rose_out = above_half.any(axis=0)
    first_exit = np.where(rose_out, above_half.argmax(axis=0), t)
    after_exit = np.arange(t)[:, None] > first_exit[None, :]
    half_dwell = ((np.abs(s - 0.5) <= cfg.plateau_band) & after_exit).sum(axis=0) / t
    two_thirds_dwell = (np.abs(s - 2.0 / 3.0) <= cfg.plateau_band).mean(axis=0)

    reversal = np.clip(np.diff(s, axis=0), None, 0.0).sum(axis=0)
    monotone_up = reversal >= -cfg.monotone_slack

    def take(mask, label):
        sel = mask & ~assigned
        labels[sel] = label
        assigned[sel] = True

    take(deviation < cfg.stationary_tol, "V")
    split = rose_out & (half_dwell >= cfg.plateau_frac)
    take(split & ends_up, "III-up")
    take(split & ends_down, "III-down")
    plateau2 = (peak >= cfg.rise_threshold) & (two_thirds_dwell >= cfg.plateau_frac)
    take(plateau2 & ends_up, "II-up")
    take(plateau2 & ends_down, "II-down")
    take(monotone_up & ends_up, "I")
    take(ends_down & (peak >= start + cfg.plateau_band), "IV")
    return labels.astype(str)


@dataclass
class SweepRow:
    r: float
    n_clauses: int
    n_vars: int
    instances: int
    solver_success_frac: float
    oracle_sat_frac: float | None
    mean_runs_to_success: float | None
    flow_counts: dict = field(default_factory=dict)


@dataclass
class SweepReport:
    n_vars: int
    instances_per_r: int
    run_budget: int
    base_seed: int
    rows: list

    @property
    def r_grid(self):
        return [row.r for row in self.rows]


def clause_count_for_ratio(r: float, n_vars: int) -> int:
    """M = round(r·N), ties rounding half up."""
    return int(math.floor(r * n_vars + 0.5))


def _sweep_cell(args):
    n_vars, m, inst_seed, config, budget, want_oracle, cap, classify = args
    inst = generate_instance(n_vars, m, inst_seed)
    f = CostFunction.from_instance(inst)
    outcome = solve_with_restarts(f, config, budget, workers=1)
    sat = None
    if want_oracle and n_vars <= cap:
        sat = brute_force_oracle(inst, cap=cap).satisfiable
    counts = {}
    if classify and outcome.solved:
        rerun = rerun_with_trajectory(f, config, outcome.winner_index)
        for lbl in classify_flows(rerun.trajectory):
            counts[lbl] = counts.get(lbl, 0) + 1
    runs = outcome.stats.runs_attempted if outcome.solved else None
    return outcome.solved, runs, sat, counts


def phase_sweep(
    n_vars: int,
    r_grid,
    instances_per_r: int,
    config: SolverConfig,
    run_budget: int,
    base_seed: int,
    workers: int = 1,
    use_oracle: bool = True,
    oracle_cap: int = ORACLE_CAP,
    classify: bool = True,
) -> SweepReport:
    """Solve random instances across a grid of ratios r with M = round(r·N).

    Per grid cell (r index i, instance index j) the instance seed is
    base_seed XOR mix64((i << 32) | j) and the restart base seed is mix64 of
    that, so every cell is reproducible in isolation and the report is
    bitwise identical for any worker count. Records the solver success
    fraction under the run budget, exact satisfiability when N is within the
    oracle cap, mean runs-to-success among solved cells, and the flow-family
    populations of the winning runs.
    """
    if instances_per_r < 1:
        raise ValueError("instances_per_r must be at least 1")
    if run_budget < 1:
        raise ValueError("run_budget must be at least 1")
    r_grid = [float(r) for r in r_grid]
    if not r_grid:
        raise ValueError("empty ratio grid")
    plan = []
    for r in r_grid:
        if not 0.0 < r <= 1.0:
            raise ValueError(f"ratio r={r} outside (0, 1]")
        m = clause_count_for_ratio(r, n_vars)
        if m < 1:
            raise ValueError(f"ratio r={r} gives no clauses at N={n_vars}")
        if m > math.comb(n_vars, 3):
            raise ValueError(f"ratio r={r} needs {m} distinct clauses; N={n_vars} has too few")
        plan.append((r, m))

    cells = []
    for i, (r, m) in enumerate(plan):
        for j in range(instances_per_r):
            inst_seed = derive_run_seed(base_seed, (i << 32) | j)
            cell_cfg = config_with(config, seed=mix64(inst_seed))
            cells.append(
                (n_vars, m, inst_seed, cell_cfg, run_budget, use_oracle, oracle_cap, classify)
            )

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_cell, cells, chunksize=4))
    else:
        outcomes = [_sweep_cell(c) for c in cells]

    rows = []
    for i, (r, m) in enumerate(plan):
        chunk = outcomes[i * instances_per_r : (i + 1) * instances_per_r]
        solved = sum(1 for ok, _, _, _ in chunk if ok)
        runs = [ru for ok, ru, _, _ in chunk if ok]
        sats = [sa for _, _, sa, _ in chunk if sa is not None]
        counts: dict = {}
        for _, _, _, c in chunk:
            for lbl, v in c.items():
                counts[lbl] = counts.get(lbl, 0) + v
        rows.append(
            SweepRow(
                r=r,
                n_clauses=m,
                n_vars=n_vars,
                instances=instances_per_r,
                solver_success_frac=solved / instances_per_r,
                oracle_sat_frac=(sum(sats) / len(sats)) if sats else None,
                mean_runs_to_success=(sum(runs) / len(runs)) if runs else None,
                flow_counts=counts,
            )
        )
    return SweepReport(n_vars, instances_per_r, run_budget, base_seed, rows)


def r_star_estimate(report: SweepReport) -> float | None:
    """Ratio where the oracle satisfiable fraction crosses 1/2, by linear
    interpolation between the first adjacent grid points that straddle it.
    None when no oracle data or no crossing."""
    pts = [(row.r, row.oracle_sat_frac) for row in report.rows if row.oracle_sat_frac is not None]
    for (r0, s0), (r1, s1) in zip(pts, pts[1:]):
        if s0 >= 0.5 >= s1:
            if s0 == s1:
                return r0
            return r0 + (s0 - 0.5) * (r1 - r0) / (s0 - s1)
    return None


# ---------------------------------------------------------------------------
# CSV emission (bit-stable: floats printed with 17 significant digits)


def _g17(x) -> str:
    return format(float(x), ".17g")


def _resolve(fileobj_or_path, mode="w"):
    if hasattr(fileobj_or_path, "write"):
        return fileobj_or_path, False
    return open(fileobj_or_path, mode), True


def write_trajectory_csv(trajectory: Trajectory, fileobj_or_path) -> None:
    """Rows `iter,F,x1,...,xN`, one per sampled iteration (1-based index)."""
    fh, owned = _resolve(fileobj_or_path)
    try:
        n = trajectory.snapshots.shape[1]
        fh.write("iter,F," + ",".join(f"x{i + 1}" for i in range(n)) + "\n")
        for it, cost, snap in zip(trajectory.iterations, trajectory.costs, trajectory.snapshots):
            fh.write(f"{int(it)},{_g17(cost)}," + ",".join(_g17(v) for v in snap) + "\n")
    finally:
        if owned:
            fh.close()


def write_labels_csv(labels, clause_degree, fileobj_or_path) -> None:
    """Rows `var,C_k,label` with 1-based variable numbering."""
    fh, owned = _resolve(fileobj_or_path)
    try:
        fh.write("var,C_k,label\n")
        for i, (deg, lbl) in enumerate(zip(np.asarray(clause_degree), labels)):
            fh.write(f"{i + 1},{int(deg)},{lbl}\n")
    finally:
        if owned:
            fh.close()


def write_sweep_csv(report: SweepReport, fileobj_or_path) -> None:
    """Rows `r,M,N,instances,solver_success_frac,oracle_sat_frac,
    mean_runs_to_success`; absent oracle data or an empty success set print
    as nan."""
    fh, owned = _resolve(fileobj_or_path)
    try:
        fh.write("r,M,N,instances,solver_success_frac,oracle_sat_frac,mean_runs_to_success\n")
        for row in report.rows:
            sat = _g17(row.oracle_sat_frac) if row.oracle_sat_frac is not None else "nan"
            mrs = (
                _g17(row.mean_runs_to_success) if row.mean_runs_to_success is not None else "nan"
            )
            fh.write(
                f"{_g17(row.r)},{row.n_clauses},{row.n_vars},{row.instances},"
                f"{_g17(row.solver_success_frac)},{sat},{mrs}\n"
            )
    finally:
        if owned:
            fh.close()

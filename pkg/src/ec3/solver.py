"""Small-step projected gradient descent on F with multi-restart.

One run: start on a sphere of radius `start_radius` around the hypercube
center, repeat x ← clamp(x − η·∇F(x), 0, 1) until no coordinate moves more
than `stop_tol` (or an iteration cap), round the final point to a bit
assignment, and verify it. The interior point (2/3, …, 2/3) is a stationary
saddle of every F and must not be used as a start.

Restarts draw independent start points from per-run seeds derived
deterministically from the base seed (see derive_run_seed), so a multi-run
solve is reproducible and — because runs are scheduled in fixed waves and
reported up to the smallest successful run index — its outcome is identical
for any worker-pool size.

Run-count planning uses the geometric-trial picture: if a single run succeeds
with probability q, the expected number of runs to the first success is
n_s = 1/q with variance (1−q)/q², and the one-sided Chebyshev bound
P(no success in k·n_s − 1 runs) ≤ (1−q)/(1−q+(k−1)²) gives the run budget
for a target confidence (k = 11 leaves less than 1%).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .cost import CostFunction, vertex_point
from .instance import check_assignment

SADDLE_COORD = 2.0 / 3.0
# start points this close (euclidean) to the saddle are redrawn
_SADDLE_EXCLUSION = 1e-9
# a stalled run with gradient below this and no vertex reached is reported
# as Iteration-cap rather than Converged-unsolved
_STALL_GRAD_TOL = 1e-15

SOLVED = "Solved"
CONVERGED_UNSOLVED = "Converged-unsolved"
ITERATION_CAP = "Iteration-cap"

_MASK64 = (1 << 64) - 1


def mix64(v: int) -> int:
    """First output of a splitmix64 stream seeded with v (Steele et al.):
    add the golden-ratio increment 0x9E3779B97F4A7C15, then xor-shift-multiply
    with 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB. A fixed, well-scrambled
    64-bit hash used for seed derivation."""
    z = (v + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_run_seed(base_seed: int, run_index: int) -> int:
    """Per-run seed: base_seed XOR mix64(run_index). Distinct, reproducible,
    and independent of how runs are distributed over workers."""
    return (base_seed ^ mix64(run_index)) & _MASK64


@dataclass
class SolverConfig:
    eta: float = 0.005          # gradient step size
    start_radius: float = 0.05  # sphere radius around (1/2, …, 1/2)
    max_iters: int = 1_000_000
    stop_tol: float = 1e-12    # max-norm displacement treated as a fixed point
    seed: int = 0
    record_every: int = 10      # trajectory sampling stride

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if not 0 < self.start_radius < 0.5:
            raise ValueError("start_radius must lie in (0, 1/2)")
        if self.stop_tol < 0:
            raise ValueError("stop_tol must be nonnegative")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.record_every < 1:
            raise ValueError("record_every must be at least 1")


@dataclass(frozen=True)
class Trajectory:
    """Sampled iterates of one run.

    Iteration indices are 1-based: index 1 is the start point X^(1) and
    index t+1 is the point after t update steps, so the first recorded
    displacement is snapshot(2) − snapshot(1). The first five updates are
    always recorded at stride 1 (the starting-slope law needs them); later
    iterations are sampled every `stride` steps, plus the final iterate.
    """

    instance_id: str
    run_seed: int | None
    iterations: np.ndarray  # (T,), strictly increasing, starts at 1
    costs: np.ndarray       # (T,), F at each snapshot
    snapshots: np.ndarray   # (T, N)
    stride: int

    def snapshot_at(self, iteration: int) -> np.ndarray:
        """The recorded point X^(iteration); KeyError if not sampled."""
        pos = np.searchsorted(self.iterations, iteration)
        if pos >= len(self.iterations) or self.iterations[pos] != iteration:
            raise KeyError(f"iteration {iteration} was not recorded")
        return self.snapshots[pos]


@dataclass
class RunResult:
    status: str                 # SOLVED / CONVERGED_UNSOLVED / ITERATION_CAP
    final_point: np.ndarray
    final_cost: float           # F at the final (continuous) iterate
    vertex_cost: float          # F at the rounded vertex (exact integer)
    rounded: np.ndarray         # the rounded assignment Z
    iterations: int             # update steps performed
    certificate: bool           # some strictly interior iterate had F < 1
    trajectory: Trajectory | None = None


def round_point(x: np.ndarray, stop_tol: float) -> np.ndarray:
    """Round a point to a bit assignment: x_i above 1/2 → z_i = 0, below →
    z_i = 1, and a stop_tol-wide tie band at 1/2 (e.g. variables that appear
    in no clause and never move) resolves to z_i = 0 for determinism."""
    return np.where(x >= 0.5 - stop_tol, 0, 1).astype(np.uint8)


def sample_start(n_vars: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform random point on the sphere of the given radius centered at
    (1/2, …, 1/2). Points within 1e-9 of the saddle (2/3, …, 2/3) are
    redrawn — unreachable at the default radius (the saddle sits at distance
    √N/6) but enforced for general radii."""
    if not 0 < radius < 0.5:
        raise ValueError("radius must lie in (0, 1/2)")
    saddle = np.full(n_vars, SADDLE_COORD)
    while True:
        v = rng.normal(size=n_vars)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            continue
        x = 0.5 + (radius / norm) * v
        if np.linalg.norm(x - saddle) < _SADDLE_EXCLUSION:
            continue
        return x


def bsgd_run(
    f: CostFunction,
    config: SolverConfig,
    start: np.ndarray,
    record: bool = False,
    run_seed: int | None = None,
) -> RunResult:
    """One projected-gradient descent run from a given interior start point.

    Every iterate is clamped to [0, 1]^N. The run stops when the max-norm
    displacement of an update is at most stop_tol, or at max_iters. The final
    point is rounded to Z and verified; Solved means the rounded vertex has
    cost exactly 0 and passes the combinatorial check. A convergence onto a
    numerically stationary non-vertex point (gradient max-norm below 1e-15,
    e.g. the central saddle) is reported as Iteration-cap: the run spent its
    budget without reaching a decision surface.

    The certificate flag records whether any strictly interior iterate had
    F < 1, which proves satisfiability by the union bound regardless of
    whether this particular run rounds to a solution.
    """
    x = np.asarray(start, dtype=np.float64).copy()
    f._check_len(x)
    if not bool(np.all((x > 0.0) & (x < 1.0))):
        raise ValueError("start point must lie strictly inside the open unit hypercube")

    eta = config.eta
    cost_now = f.cost(x)
    certificate = cost_now < 1.0  # the start itself is strictly interior

    iters_log, costs_log, snaps_log = [], [], []
    if record:
        iters_log.append(1)
        costs_log.append(cost_now)
        snaps_log.append(x.copy())

    converged = False
    k = 0
    while k < config.max_iters:
        k += 1
        g = f.gradient(x)
        xn = np.clip(x - eta * g, 0.0, 1.0)
        delta = float(np.max(np.abs(xn - x))) if len(x) else 0.0
        x = xn
        cost_now = f.cost(x)
        if cost_now < 1.0 and bool(np.all((x > 0.0) & (x < 1.0))):
            certificate = True
        if record and (k <= 5 or k % config.record_every == 0):
            iters_log.append(k + 1)
            costs_log.append(cost_now)
            snaps_log.append(x.copy())
        if delta <= config.stop_tol:
            converged = True
            break

    if record and iters_log[-1] != k + 1:
        iters_log.append(k + 1)
        costs_log.append(cost_now)
        snaps_log.append(x.copy())

    rounded = round_point(x, config.stop_tol)
    vcost = f.cost(vertex_point(rounded))
    verdict = check_assignment(f.instance, rounded)

    if verdict.satisfied and vcost == 0.0:
        status = SOLVED
    elif not converged:
        status = ITERATION_CAP
    else:
        at_vertex = bool(np.all((x == 0.0) | (x == 1.0)))
        grad_inf = float(np.max(np.abs(f.gradient(x)))) if len(x) else 0.0
        if grad_inf < _STALL_GRAD_TOL and not at_vertex:
            status = ITERATION_CAP  # stationary stall (saddle), not a decision
        else:
            status = CONVERGED_UNSOLVED

    trajectory = None
    if record:
        iters_arr = np.array(iters_log, dtype=np.int64)
        trajectory = Trajectory(
            instance_id=f.instance.label or f"ec3-n{f.instance.n_vars}-m{f.instance.n_clauses}",
            run_seed=run_seed,
            iterations=iters_arr,
            costs=np.array(costs_log),
            snapshots=np.array(snaps_log),
            stride=config.record_every,
        )
    return RunResult(status, x, cost_now, float(vcost), rounded, k, certificate, trajectory)


@dataclass
class RestartStats:
    """Empirical restart statistics over the runs actually executed."""

    runs_attempted: int
    successes: int
    q_hat: float
    n_s_hat: float | None    # 1/q̂, or None with zero successes
    sigma_hat: float | None  # sqrt((1−q̂)/q̂²), or None with zero successes

    @classmethod
    def from_runs(cls, results) -> "RestartStats":
        r = len(results)
        s = sum(1 for res in results if res.status == SOLVED)
        q = s / r if r else 0.0
        if s > 0:
            return cls(r, s, q, 1.0 / q, math.sqrt((1.0 - q) / (q * q)))
        return cls(r, s, q, None, None)

    def chebyshev_bound(self, k: float) -> float:
        """One-sided Chebyshev bound (1−q)/(1−q+(k−1)²) at q = q̂."""
        return (1.0 - self.q_hat) / ((1.0 - self.q_hat) + (k - 1.0) ** 2)


@dataclass
class SolveOutcome:
    solved: bool
    winner: RunResult | None
    winner_index: int | None
    results: list
    stats: RestartStats


def _restart_task(args):
    f, config, index = args
    seed = derive_run_seed(config.seed, index)
    rng = np.random.default_rng(seed)
    start = sample_start(f.n_vars, config.start_radius, rng)
    return bsgd_run(f, config, start, record=False, run_seed=seed)


def solve_with_restarts(
    f: CostFunction, config: SolverConfig, max_runs: int, workers: int = 1
) -> SolveOutcome:
    """Up to max_runs independent runs, stopping at the first success.

    Runs are scheduled in waves of `workers`; after a wave containing a
    success, results are truncated at the smallest successful index. The
    returned results list — and hence every statistic — is therefore
    identical for any worker count: runs 0..w for a win at index w, or all
    max_runs on failure.
    """
    if max_runs < 1:
        raise ValueError("max_runs must be at least 1")
    workers = max(1, int(workers))
    results: list[RunResult] = []
    winner_index = None

    def consume(batch_results, batch_start):
        nonlocal winner_index
        for offset, res in enumerate(batch_results):
            results.append(res)
            if winner_index is None and res.status == SOLVED:
                winner_index = batch_start + offset
        if winner_index is not None:
            del results[winner_index + 1 :]

    if workers == 1:
        for i in range(max_runs):
            consume([_restart_task((f, config, i))], i)
            if winner_index is not None:
                break
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for base in range(0, max_runs, workers):
                idx = range(base, min(base + workers, max_runs))
                batch = list(pool.map(_restart_task, [(f, config, i) for i in idx]))
                consume(batch, base)
                if winner_index is not None:
                    break

    stats = RestartStats.from_runs(results)
    winner = results[winner_index] if winner_index is not None else None
    return SolveOutcome(winner is not None, winner, winner_index, results, stats)


def rerun_with_trajectory(f: CostFunction, config: SolverConfig, run_index: int) -> RunResult:
    """Re-execute one restart-run deterministically, recording its
    trajectory (runs are cheap; storing every trajectory of a restart batch
    is not)."""
    seed = derive_run_seed(config.seed, run_index)
    rng = np.random.default_rng(seed)
    start = sample_start(f.n_vars, config.start_radius, rng)
    return bsgd_run(f, config, start, record=True, run_seed=seed)


@dataclass(frozen=True)
class StoppingRule:
    required_runs: int
    failure_prob_bound: float


def stopping_rule(q_assumed: float, k: float) -> StoppingRule:
    """Run budget from the one-sided Chebyshev inequality: with per-run
    success probability q, running ceil(k/q − 1) times bounds the
    probability of seeing no success by (1−q)/(1−q+(k−1)²). k = 11 gives a
    bound below 1% for every q."""
    if not 0.0 < q_assumed < 1.0:
        raise ValueError("q_assumed must lie strictly between 0 and 1")
    if k <= 1.0:
        raise ValueError("k must exceed 1")
    # tiny slack so exact-arithmetic integers (e.g. k/q = 110) survive the
    # float division
    required = math.ceil(k / q_assumed - 1.0 - 1e-12)
    bound = (1.0 - q_assumed) / ((1.0 - q_assumed) + (k - 1.0) ** 2)
    return StoppingRule(int(required), float(bound))


def config_with(config: SolverConfig, **overrides) -> SolverConfig:
    """Copy a config with some fields replaced (validation re-runs)."""
    return replace(config, **overrides)

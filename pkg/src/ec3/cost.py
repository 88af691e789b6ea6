"""The continuous cost function F over the unit hypercube.

Each variable carries a probability x_i = Pr{z_i = 0}; under independent
per-bit randomization a clause over (k, m, n) is unsatisfied with probability

    P = 1 + 3·x_k·x_m·x_n − x_k·x_m − x_m·x_n − x_k·x_n

and F(X) = Σ_i P_i. F is multilinear, so it is affine in every single
coordinate (zero per-coordinate second derivative — a harmonic function with
an all-zero Hessian diagonal), takes exact integer values on hypercube
vertices (the number of unsatisfied clauses there), and is strictly positive
in the open interior. Any strictly interior point with F < 1 certifies
satisfiability: the union bound leaves positive probability that no clause
fails, so a satisfying assignment exists.

Conversions between bit assignments Z and points X use x_i = 1 − z_i
(vertex x_i = 1 means z_i = 0) everywhere in this package.

Evaluation extends to all of R^N; box constraints are the solver's job.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .instance import CheckResult, Instance, check_assignment


def clause_probability(x_k, x_m, x_n):
    """Probability that a single clause is unsatisfied; multilinear in its
    three arguments and symmetric under their permutation. Accepts scalars
    or broadcastable arrays."""
    return 1.0 + 3.0 * x_k * x_m * x_n - x_k * x_m - x_m * x_n - x_k * x_n


def vertex_point(z) -> np.ndarray:
    """The hypercube vertex encoding assignment Z (x_i = 1 − z_i)."""
    return 1.0 - np.asarray(z, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class CostFunction:
    """F and its analytic gradient for one instance.

    The gradient is assembled from clause incidence: each clause contributes
    3·x_a·x_b − x_a − x_b to the component of its third member, where a, b
    are the other two variables. Components of variables that appear in no
    clause are identically zero. Cost O(M) and gradient O(3M) per
    evaluation; immutable and safe to share across workers.
    """

    instance: Instance
    _ka: np.ndarray = field(repr=False)  # clause columns, 0-based
    _kb: np.ndarray = field(repr=False)
    _kc: np.ndarray = field(repr=False)
    _scatter: np.ndarray = field(repr=False)  # concat of the three columns

    @classmethod
    def from_instance(cls, instance: Instance) -> "CostFunction":
        c = instance.clauses.astype(np.int64) - 1
        c = c.reshape(-1, 3)
        ka, kb, kc = c[:, 0].copy(), c[:, 1].copy(), c[:, 2].copy()
        scatter = np.concatenate([ka, kb, kc])
        for a in (ka, kb, kc, scatter):
            a.setflags(write=False)
        return cls(instance, ka, kb, kc, scatter)

    @property
    def n_vars(self) -> int:
        return self.instance.n_vars

    def _check_len(self, x: np.ndarray):
        if x.shape != (self.n_vars,):
            raise ValueError(f"point has shape {x.shape}, expected ({self.n_vars},)")

    def cost(self, x) -> float:
        """F(X) = Σ_i P_i. Exact integer at vertices."""
        x = np.asarray(x, dtype=np.float64)
        self._check_len(x)
        if len(self._ka) == 0:
            return 0.0
        p = clause_probability(x[self._ka], x[self._kb], x[self._kc])
        return float(p.sum())

    def gradient(self, x) -> np.ndarray:
        """∂F/∂x_j for all j; exactly zero for zero-degree variables."""
        x = np.asarray(x, dtype=np.float64)
        self._check_len(x)
        if len(self._ka) == 0:
            return np.zeros(self.n_vars)
        xa, xb, xc = x[self._ka], x[self._kb], x[self._kc]
        terms = np.concatenate(
            [
                3.0 * xb * xc - xb - xc,
                3.0 * xa * xc - xa - xc,
                3.0 * xa * xb - xa - xb,
            ]
        )
        return np.bincount(self._scatter, weights=terms, minlength=self.n_vars)

    def hessian(self, x) -> np.ndarray:
        """Dense Hessian, offered as a diagnostic: entry (j, a) sums
        3·x_b − 1 over clauses containing both j and a (b the third member);
        the diagonal is zero by construction (F is affine per coordinate)."""
        x = np.asarray(x, dtype=np.float64)
        self._check_len(x)
        h = np.zeros((self.n_vars, self.n_vars))
        cols = (self._ka, self._kb, self._kc)
        for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
            w = 3.0 * x[cols[k]] - 1.0
            np.add.at(h, (cols[i], cols[j]), w)
            np.add.at(h, (cols[j], cols[i]), w)
        return h

    def vertex_cost(self, z) -> float:
        """F at the vertex encoding Z; equals the unsatisfied-clause count."""
        return self.cost(vertex_point(z))


def harmonicity_defect(f: CostFunction, x, h: float) -> np.ndarray:
    """Per-coordinate second central difference (F(x+h·e_j) − 2F(x) +
    F(x−h·e_j)) / h². Identically zero in exact arithmetic for every j and
    every x — the numerical result is pure rounding noise."""
    if h <= 0:
        raise ValueError("step h must be positive")
    x = np.asarray(x, dtype=np.float64)
    f._check_len(x)
    fx = f.cost(x)
    out = np.empty(f.n_vars)
    for j in range(f.n_vars):
        xp = x.copy()
        xp[j] = x[j] + h
        xm = x.copy()
        xm[j] = x[j] - h
        out[j] = (f.cost(xp) - 2.0 * fx + f.cost(xm)) / (h * h)
    return out


@dataclass(frozen=True)
class VertexCheck:
    cost_at_vertex: float
    unsat_count: int
    agree: bool


def vertex_spectrum_check(f: CostFunction, z) -> VertexCheck:
    """Evaluate F at the vertex of Z and compare, with zero tolerance,
    against the combinatorial unsatisfied-clause count. Multilinear
    evaluation at 0/1 arguments is exact in floating point, so `agree`
    failing would indicate a real bug, not roundoff."""
    cost = f.vertex_cost(z)
    chk: CheckResult = check_assignment(f.instance, z)
    return VertexCheck(cost, chk.unsatisfied_count, cost == float(chk.unsatisfied_count))

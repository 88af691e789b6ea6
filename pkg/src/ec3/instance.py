"""EC3 (positive 1-in-3 SAT) instances: representation, file I/O, random
generation, and an exact brute-force decision oracle for small N.

An instance is a set of M clauses over N boolean variables; each clause names
three distinct 1-based variable indices and is satisfied by an assignment Z
exactly when z_k + z_m + z_n = 1.

File format (line oriented, whitespace separated):

    c optional comment lines
    p ec3 <N> <M>
    <k> <m> <n>        (M lines, 1-based indices)

Assignments travel as a single line of N space-separated 0/1 values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

# Hard ceiling for exhaustive enumeration: 2^26 assignments (~67M) is the
# largest search the bit-parallel oracle finishes in seconds.
ORACLE_CAP = 26

_WORD = np.uint64(0xFFFFFFFFFFFFFFFF)

# Truth pattern of variable v (v < 6) across the 64 assignments packed in one
# word: bit s of pattern v equals bit v of the slot index s.
_LOW_BIT_PATTERNS = np.array(
    [
        0xAAAAAAAAAAAAAAAA,
        0xCCCCCCCCCCCCCCCC,
        0xF0F0F0F0F0F0F0F0,
        0xFF00FF00FF00FF00,
        0xFFFF0000FFFF0000,
        0xFFFFFFFF00000000,
    ],
    dtype=np.uint64,
)


@dataclass(frozen=True, eq=False)
class Instance:
    """An EC3 problem: N variables and an ordered list of 3-index clauses.

    Immutable after construction (arrays are marked read-only), so instances
    can be shared freely across worker processes.
    """

    n_vars: int
    clauses: np.ndarray        # shape (M, 3), int32, 1-based indices
    clause_degree: np.ndarray  # shape (N,), per-variable clause count
    label: str | None = None

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    @property
    def ratio(self) -> float:
        """Clauses-to-variables ratio r = M/N."""
        return self.n_clauses / self.n_vars


def make_instance(n_vars, clauses, label=None) -> Instance:
    """Validate a clause list and build an Instance.

    Raises ValueError for out-of-range or repeated indices; duplicate clauses
    (as unordered triples) are accepted with a warning.
    """
    if n_vars < 1:
        raise ValueError(f"n_vars must be >= 1, got {n_vars}")
    arr = np.asarray(clauses, dtype=np.int32)
    if arr.size == 0:
        arr = arr.reshape(0, 3)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError("clauses must be an (M, 3) array of variable indices")
    if arr.size and (arr.min() < 1 or arr.max() > n_vars):
        raise ValueError(f"variable index out of range [1, {n_vars}]")
    seen = {}
    for i, row in enumerate(arr):
        if len(set(row.tolist())) != 3:
            raise ValueError(f"clause {i + 1} repeats a variable: {tuple(row)}")
        key = frozenset(row.tolist())
        if key in seen:
            warnings.warn(
                f"duplicate clause {tuple(sorted(key))} (lines {seen[key] + 1} and {i + 1})",
                stacklevel=2,
            )
        else:
            seen[key] = i
    degree = np.bincount(arr.ravel() - 1, minlength=n_vars).astype(np.int64)
    arr.setflags(write=False)
    degree.setflags(write=False)
    return Instance(int(n_vars), arr, degree, label)


def parse_instance(text: str, label: str | None = None) -> Instance:
    """Parse the instance file format. Comment lines start with 'c'."""
    header = None
    triples = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()
        if header is None:
            if len(tokens) != 4 or tokens[0] != "p" or tokens[1] != "ec3":
                raise ValueError(f"line {lineno}: expected header 'p ec3 <N> <M>', got {line!r}")
            try:
                header = (int(tokens[2]), int(tokens[3]))
            except ValueError:
                raise ValueError(f"line {lineno}: non-integer N/M in header {line!r}") from None
            if header[0] < 1 or header[1] < 0:
                raise ValueError(f"line {lineno}: bad sizes in header {line!r}")
            continue
        if len(tokens) != 3:
            raise ValueError(f"line {lineno}: expected 3 indices, got {line!r}")
        try:
            triples.append(tuple(int(t) for t in tokens))
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer index in {line!r}") from None
    if header is None:
        raise ValueError("missing 'p ec3 <N> <M>' header")
    n_vars, m = header
    if len(triples) != m:
        raise ValueError(f"header promises {m} clauses, file contains {len(triples)}")
    return make_instance(n_vars, np.array(triples, dtype=np.int32).reshape(m, 3), label=label)


def emit_instance(instance: Instance, comments=()) -> str:
    """Render an Instance in the file format (inverse of parse_instance)."""
    lines = [f"c {c}" for c in comments]
    lines.append(f"p ec3 {instance.n_vars} {instance.n_clauses}")
    lines.extend(" ".join(str(v) for v in row) for row in instance.clauses.tolist())
    return "\n".join(lines) + "\n"


def generate_instance(n_vars: int, n_clauses: int, seed: int) -> Instance:
    """Draw n_clauses unordered triples of distinct variables uniformly
    without replacement from all C(N, 3) possibilities.

    Duplicate clauses are rejected and redrawn, so the clause list is
    duplicate-free; a duplicate would only double one additive cost term
    without changing satisfiability. Deterministic for fixed arguments.
    """
    if n_vars < 3:
        raise ValueError(f"need n_vars >= 3 to form clauses, got {n_vars}")
    if n_clauses > math.comb(n_vars, 3):
        raise ValueError(
            f"cannot draw {n_clauses} distinct clauses over {n_vars} variables "
            f"(only {math.comb(n_vars, 3)} exist)"
        )
    rng = np.random.default_rng(seed)
    seen = set()
    rows = []
    while len(rows) < n_clauses:
        triple = rng.choice(n_vars, size=3, replace=False).astype(np.int32) + 1
        key = frozenset(triple.tolist())
        if key in seen:
            continue
        seen.add(key)
        rows.append(triple)
    clauses = np.array(rows, dtype=np.int32).reshape(n_clauses, 3)
    return make_instance(
        n_vars, clauses, label=f"random-n{n_vars}-m{n_clauses}-s{seed}"
    )


@dataclass(frozen=True)
class CheckResult:
    satisfied: bool
    unsatisfied_count: int


def check_assignment(instance: Instance, z) -> CheckResult:
    """Count clauses whose three bits do not sum to exactly 1."""
    z = np.asarray(z)
    if z.shape != (instance.n_vars,):
        raise ValueError(f"assignment length {z.shape} != n_vars {instance.n_vars}")
    if instance.n_clauses == 0:
        return CheckResult(True, 0)
    sums = z.astype(np.int64)[instance.clauses - 1].sum(axis=1)
    unsat = int(np.count_nonzero(sums != 1))
    return CheckResult(unsat == 0, unsat)


@dataclass(frozen=True)
class OracleResult:
    satisfiable: bool
    witness: np.ndarray | None  # lowest-index satisfying assignment, or None
    n_solutions: int


def brute_force_oracle(instance: Instance, cap: int = ORACLE_CAP) -> OracleResult:
    """Exhaustively decide satisfiability for n_vars <= cap.

    Assignments are enumerated 64 at a time: assignment index a (bit v of a
    is z_{v+1}) maps to slot a%64 of word a//64, and each clause's
    exactly-one condition is evaluated as a bitwise expression over variable
    truth patterns. Returns the exact model count and the satisfying
    assignment with the smallest index (all-zeros first), matching what a
    sequential scan would report.
    """
    n = instance.n_vars
    if n > cap:
        raise ValueError(f"n_vars={n} exceeds oracle cap {cap}")
    if instance.n_clauses == 0:
        witness = np.zeros(n, dtype=np.uint8)
        return OracleResult(True, witness, 2**n)

    cls0 = instance.clauses.astype(np.int64) - 1  # 0-based
    n_words = 1 << max(0, n - 6)
    chunk = min(n_words, 1 << 16)
    count = 0
    first_index = None

    def patterns(var: int, word_idx: np.ndarray) -> np.ndarray:
        if var < 6:
            return np.broadcast_to(_LOW_BIT_PATTERNS[var], word_idx.shape)
        bit = (word_idx >> np.uint64(var - 6)) & np.uint64(1)
        return np.where(bit.astype(bool), _WORD, np.uint64(0))

    for base in range(0, n_words, chunk):
        words = np.arange(base, min(base + chunk, n_words), dtype=np.uint64)
        sat = np.full(words.shape, _WORD, dtype=np.uint64)
        for k, m, j in cls0:
            pk = patterns(int(k), words)
            pm = patterns(int(m), words)
            pj = patterns(int(j), words)
            # exactly one of three bits set
            one = (pk ^ pm ^ pj) & ~((pk & pm) | (pm & pj) | (pk & pj))
            sat &= one
        if n < 6:
            sat &= np.uint64((1 << (1 << n)) - 1)  # only 2^n slots are real
        count += int(np.bitwise_count(sat).sum())
        if first_index is None:
            nz = np.flatnonzero(sat)
            if nz.size:
                w = int(sat[nz[0]])
                slot = (w & -w).bit_length() - 1
                first_index = (base + int(nz[0])) * 64 + slot

    if first_index is None:
        return OracleResult(False, None, 0)
    witness = np.array([(first_index >> v) & 1 for v in range(n)], dtype=np.uint8)
    return OracleResult(True, witness, count)


def parse_assignment(text: str, n_vars: int) -> np.ndarray:
    """Parse a single-line assignment file: N space-separated 0/1 values."""
    tokens = text.split()
    if len(tokens) != n_vars:
        raise ValueError(f"assignment has {len(tokens)} values, instance has {n_vars} variables")
    if any(t not in ("0", "1") for t in tokens):
        raise ValueError("assignment values must be 0 or 1")
    return np.array([int(t) for t in tokens], dtype=np.uint8)


def emit_assignment(z) -> str:
    return " ".join(str(int(b)) for b in np.asarray(z)) + "\n"

"""Exact micro-scale values of the extremal quantities, and counterexample hunts.

Every search returns its witness together with an ``exact`` flag; running out
of nodes or time is reported as ``exact=False`` and never as "nothing found".
"""

from __future__ import annotations

import math
import multiprocessing as mp
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations, product
from math import comb
from typing import Callable, Optional, Sequence

from .core import BlockedSequence, Matrix01, PermFamily, Permutation
from .constructions import phi, phi_odd, smt
from .patterns import (
    _alternation_from_masks,
    _greedy_rows,
    contains_ds,
    contains_pattern,
    ds_matrix,
    find_formation,
    find_sequence_formation,
    is_ds_sequence,
    mst,
    split_formation,
)
from .vcdim import vc_dimension

MEX_EXHAUSTIVE_CAP = 5
MEX_BB_CAP = 7
R_CAP = 4
LAMBDA_CAP = 20
SEQ_CAP = 20
DELTA_CAP = 5
INFINITE = math.inf


class CapExceeded(ValueError):
    pass


class _Exhausted(Exception):
    pass


@dataclass(frozen=True)
class SearchBudget:
    node_limit: int = 50_000_000  # per worker process
    time_limit: float = 600.0
    workers: int = 1

    def __post_init__(self):
        if self.node_limit <= 0 or self.time_limit <= 0 or self.workers < 1:
            raise ValueError("budget limits must be positive and workers >= 1")


@dataclass
class OracleResult:
    value: object  # int, INFINITE, or the best lower bound when exact is False
    witness: object = None
    exact: bool = True
    nodes: int = 0
    notes: str = ""
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        w = self.witness
        if isinstance(w, Matrix01):
            w = {"m": w.m, "n": w.n, "grid": w.to_grid()}
        elif isinstance(w, PermFamily):
            w = [list(p.image) for p in w]
        elif isinstance(w, BlockedSequence):
            w = [list(b) for b in w.blocks]
        value = "infinite" if self.value == INFINITE else self.value
        return {"value": value, "exact": self.exact, "witness": w, "nodes": self.nodes,
                "notes": self.notes, **self.extra}


class _Meter:
    def __init__(self, budget: SearchBudget):
        self.nodes = 0
        self.limit = budget.node_limit
        self.deadline = time.monotonic() + budget.time_limit

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.limit:
            raise _Exhausted("node limit")
        if not self.nodes & 1023 and time.monotonic() > self.deadline:
            raise _Exhausted("time limit")


def _popcount(x: int) -> int:
    return bin(x).count("1")


# ---------------------------------------------------------------------------
# Shared best value across worker processes
# ---------------------------------------------------------------------------


class _LocalBest:
    def __init__(self):
        self.value = -1

    def get(self) -> int:
        return self.value

    def offer(self, v: int) -> None:
        self.value = max(self.value, v)


class _SharedBest:
    def __init__(self, value):
        self._v = value

    def get(self) -> int:
        return self._v.value

    def offer(self, v: int) -> None:
        with self._v.get_lock():
            if v > self._v.value:
                self._v.value = v


_WORKER_BEST = None


def _init_worker(value) -> None:
    global _WORKER_BEST
    _WORKER_BEST = _SharedBest(value)


def _part_entry(fn, args, part, budget):
    return fn(*args, part=part, best=_WORKER_BEST, meter=_Meter(budget))


def _run_parts(fn: Callable, args: tuple, parts: int, budget: SearchBudget) -> list[tuple]:
    """Run ``fn`` once per top-level branch; each call returns
    (value, witness, nodes, complete)."""
    if budget.workers <= 1 or parts <= 1:
        best, meter = _LocalBest(), _Meter(budget)
        out = []
        for i in range(parts):
            before = meter.nodes
            res = fn(*args, part=i, best=best, meter=meter)
            out.append(res[:2] + (meter.nodes - before,) + res[3:])
        return out
    ctx = mp.get_context("fork")
    value = ctx.Value("q", -1)
    with ProcessPoolExecutor(budget.workers, mp_context=ctx, initializer=_init_worker, initargs=(value,)) as ex:
        futures = [ex.submit(_part_entry, fn, args, i, budget) for i in range(parts)]
        return [f.result() for f in futures]


def _combine(results: list[tuple]) -> tuple[int, object, int, bool]:
    """Best value; among equal values the lowest branch wins, which is the
    witness a sequential search would report."""
    value, witness = -1, None
    for v, w, _, _ in results:
        if v > value:
            value, witness = v, w
    return value, witness, sum(r[2] for r in results), all(r[3] for r in results)


# ---------------------------------------------------------------------------
# Column-mask search shared by mex and p
# ---------------------------------------------------------------------------


def _col_rows(masks: Sequence[int], m: int) -> list[int]:
    """Row masks of the matrix whose columns are ``masks`` (bit t = column t)."""
    rows = [0] * m
    for t, cm in enumerate(masks):
        for r in range(m):
            if cm >> r & 1:
                rows[r] |= 1 << t
    return rows


def _pattern_needs(pattern: Matrix01) -> list[int]:
    return [sum(1 << (c - 1) for c in row) for row in pattern.rows]


def _pattern_hits(pattern_needs: list[int], masks: Sequence[int], m: int) -> bool:
    return _greedy_rows(_col_rows(masks, m), pattern_needs) is not None


@lru_cache(maxsize=16)
def _mex_tables(pattern: Matrix01, n: int):
    """Candidate column masks (heaviest first) and, for two-column patterns,
    the table of column pairs that contain the pattern."""
    needs = _pattern_needs(pattern)
    order = sorted(range(1 << n), key=lambda x: (-_popcount(x), x))
    pair = None
    if pattern.n == 1:
        order = [x for x in order if not _pattern_hits(needs, [x], n)]
    elif pattern.n == 2:
        pair = {(a, b): _pattern_hits(needs, [a, b], n) for a in order for b in order}
    return needs, order, pair


def _mex_branch(pattern: Matrix01, n: int, bounded: bool, *, part, best, meter):
    needs, order, pair = _mex_tables(pattern, n)
    width = pattern.n
    if part >= len(order):
        return -1, None, 0, True
    chosen: list[int] = []
    local = [-1, None]

    def fits(mask: int) -> bool:
        if width <= 2:
            return True  # filtered through the candidate lists
        return not any(_pattern_hits(needs, [chosen[i] for i in combo] + [mask], n)
                       for combo in combinations(range(len(chosen)), width - 1))

    def floor() -> int:
        return max(local[0] + 1, best.get()) if bounded else 0

    def dfs(j: int, total: int, cands: list[int], start: int, stop: int) -> None:
        meter.tick()
        if j == n:
            if total > local[0]:
                local[0], local[1] = total, list(chosen)
                best.offer(total)
            return
        for idx in range(start, stop):
            mask = cands[idx]
            if not fits(mask):
                continue
            nxt = [x for x in cands if not pair[mask, x]] if pair is not None else cands
            if bounded:
                rest = _popcount(nxt[0]) if nxt else 0
                if total + _popcount(mask) + (n - j - 1) * rest < floor():
                    continue
            chosen.append(mask)
            dfs(j + 1, total + _popcount(mask), nxt, 0, len(nxt))
            chosen.pop()

    complete = True
    try:
        dfs(0, 0, order, part, part + 1)
    except _Exhausted:
        complete = False
    witness = Matrix01.from_col_masks(local[1], n) if local[1] is not None else None
    return local[0], witness, meter.nodes, complete


def brute_mex(pattern: Matrix01, n: int, budget: SearchBudget = SearchBudget(), method: str = "bb") -> OracleResult:
    """Largest number of 1-entries in an n x n matrix avoiding ``pattern``.

    ``method="bb"`` prunes with the best value found so far; ``"exhaustive"``
    only prunes on containment (monotone: a column prefix that contains the
    pattern cannot be extended).
    """
    if method not in ("bb", "exhaustive"):
        raise ValueError(f"unknown method {method!r}")
    cap = MEX_EXHAUSTIVE_CAP if method == "exhaustive" or pattern.n > 2 else MEX_BB_CAP
    if n < 1 or n > cap:
        raise CapExceeded(f"brute_mex supports 1 <= n <= {cap} here, got {n}")
    parts = 1 << n
    res = _run_parts(_mex_branch, (pattern, n, method == "bb"), parts, budget)
    value, witness, nodes, complete = _combine(res)
    return OracleResult(value, witness, complete, nodes)


def _tuple_full_masks(masks: Sequence[int]) -> bool:
    """Every ordering of the columns admits an increasing chain of rows."""
    for order in permutations(masks):
        prev = -1
        for cm in order:
            above = cm >> (prev + 1) << (prev + 1)
            if not above:
                break
            prev = (above & -above).bit_length() - 1
        else:
            continue
        return False
    return True


def _p_branch(k: int, n: int, *, part, best, meter):
    order = sorted(range(1 << n), key=lambda x: (-_popcount(x), x))
    full_memo: dict = {}

    def full(masks: tuple) -> bool:
        key = tuple(sorted(masks))
        if key not in full_memo:
            full_memo[key] = _tuple_full_masks(key)
        return full_memo[key]

    chosen: list[int] = []
    local = [-1, None]

    def dfs(j: int, total: int, start: int, stop: int) -> None:
        meter.tick()
        if j == n:
            if total > local[0]:
                local[0], local[1] = total, list(chosen)
                best.offer(total)
            return
        for idx in range(start, stop):
            mask = order[idx]
            # columns are placed in canonical order, so later ones are no heavier
            if total + (n - j) * _popcount(mask) < max(local[0] + 1, best.get()):
                break
            if any(full(tuple(chosen[i] for i in combo) + (mask,))
                   for combo in combinations(range(j), k)):
                continue
            chosen.append(mask)
            dfs(j + 1, total + _popcount(mask), idx, len(order))
            chosen.pop()

    complete = True
    try:
        dfs(0, 0, part, part + 1)
    except _Exhausted:
        complete = False
    witness = Matrix01.from_col_masks(local[1], n) if local[1] is not None else None
    return local[0], witness, meter.nodes, complete


def brute_p(k: int, n: int, budget: SearchBudget = SearchBudget()) -> OracleResult:
    """Largest number of 1-entries in an n x n matrix with no full (k+1)-tuple of columns.

    Fullness of a column tuple does not depend on the order of its columns,
    so only matrices whose columns are sorted canonically are searched.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 1 or n > MEX_BB_CAP:
        raise CapExceeded(f"brute_p supports 1 <= n <= {MEX_BB_CAP}, got {n}")
    res = _run_parts(_p_branch, (k, n), 1 << n, budget)
    value, witness, nodes, complete = _combine(res)
    return OracleResult(value, witness, complete, nodes)


# ---------------------------------------------------------------------------
# r_k(n)
# ---------------------------------------------------------------------------


def _pattern_index(values: Sequence[int]) -> tuple[int, ...]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    out = [0] * len(values)
    for rank, i in enumerate(order, 1):
        out[i] = rank
    return tuple(out)


def brute_r(k: int, n: int, budget: SearchBudget = SearchBudget()) -> OracleResult:
    """Largest family of n-permutations with VC-dimension at most k.

    A family has VC-dimension <= k iff every (k+1)-tuple of positions misses
    some pattern, so every such family lies inside one of the families cut out
    by choosing a missing pattern per tuple. ``extra["exactly_k"]`` holds the
    largest size among those with VC-dimension exactly k (None if no family
    reaches k).
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if n < 1 or n > R_CAP:
        raise CapExceeded(f"brute_r supports 1 <= n <= {R_CAP}, got {n}")
    perms = [Permutation(p) for p in permutations(range(1, n + 1))]
    meter = _Meter(budget)
    if k >= n:
        fam = PermFamily.of(perms)
        vc = vc_dimension(fam)
        return OracleResult(len(fam), fam, True, 1, extra={"exactly_k": len(fam) if vc == k else None})
    tuples = list(combinations(range(n), k + 1))
    pats = list(permutations(range(1, k + 2)))
    seen = [[_pattern_index([p.image[i] for i in t]) for t in tuples] for p in perms]
    best_size, best_fam, exact_k = -1, None, None
    complete = True
    try:
        for choice in product(pats, repeat=len(tuples)):
            meter.tick()
            members = [p for p, row in zip(perms, seen) if all(a != b for a, b in zip(row, choice))]
            if len(members) > best_size:
                best_size, best_fam = len(members), members
            if members and (exact_k is None or len(members) > exact_k):
                if vc_dimension(PermFamily.of(members)) == k:
                    exact_k = len(members)
    except _Exhausted:
        complete = False
    fam = PermFamily(n, tuple(best_fam or ()))
    notes = "" if exact_k == best_size else "the <= k and exactly-k readings differ"
    return OracleResult(best_size, fam, complete, meter.nodes, notes, {"exactly_k": exact_k})


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------


class _RunTracker:
    """Number of runs of the sequence restricted to each pair of symbols."""

    def __init__(self, n: int):
        self.n = n
        self.runs = [[0] * (n + 1) for _ in range(n + 1)]
        self.last = [-1] * (n + 1)
        self.length = 0

    def growth(self, x: int) -> list[int]:
        last = self.last
        if last[x] < 0:
            return [y for y in range(1, self.n + 1) if last[y] >= 0]
        return [y for y in range(1, self.n + 1) if y != x and last[y] > last[x]]

    def worst_after(self, x: int, grow: list[int]) -> int:
        step = 2 if self.last[x] < 0 else 1
        return max((self.runs[x][y] + step for y in grow), default=1)

    def push(self, x: int, grow: list[int]):
        step = 2 if self.last[x] < 0 else 1
        for y in grow:
            self.runs[x][y] += step
            self.runs[y][x] = self.runs[x][y]
        undo = (x, self.last[x], grow, step)
        self.last[x] = self.length
        self.length += 1
        return undo

    def pop(self, undo) -> None:
        x, old, grow, step = undo
        self.length -= 1
        self.last[x] = old
        for y in grow:
            self.runs[x][y] -= step
            self.runs[y][x] = self.runs[x][y]


def brute_lambda(s: int, n: int, budget: SearchBudget = SearchBudget()) -> OracleResult:
    """Longest sequence over n symbols with no immediate repetition and no
    alternation of length s + 2."""
    if s < 1 or n < 1:
        raise ValueError("need s, n >= 1")
    meter = _Meter(budget)
    tr = _RunTracker(n)
    seq: list[int] = []
    best: list = [0, []]

    def dfs(introduced: int) -> None:
        meter.tick()
        if len(seq) > best[0]:
            best[0], best[1] = len(seq), list(seq)
            if len(seq) > LAMBDA_CAP:
                raise CapExceeded(f"lambda_{s}({n}) exceeds the length cap {LAMBDA_CAP}")
        prev = seq[-1] if seq else 0
        options = [x for x in range(1, introduced + 1) if x != prev]
        if introduced < n:
            options.append(introduced + 1)
        for x in options:
            grow = tr.growth(x)
            if tr.worst_after(x, grow) >= s + 2:
                continue
            undo = tr.push(x, grow)
            seq.append(x)
            dfs(max(introduced, x))
            seq.pop()
            tr.pop(undo)

    complete = True
    try:
        dfs(0)
    except _Exhausted:
        complete = False
    assert is_ds_sequence(best[1], s)
    return OracleResult(best[0], best[1], complete, meter.nodes)


def _f_search(r: int, s: int, n: int, meter: _Meter) -> tuple[int, list]:
    seq: list[int] = []
    best: list = [0, []]

    def dfs(introduced: int) -> None:
        meter.tick()
        if len(seq) > best[0]:
            best[0], best[1] = len(seq), list(seq)
            if len(seq) > SEQ_CAP:
                raise CapExceeded(f"F_{{{r},{s}}}({n}) exceeds the length cap {SEQ_CAP}")
        recent = set(seq[-(r - 1):]) if r > 1 else set()
        options = [x for x in range(1, introduced + 1) if x not in recent]
        if introduced < n:
            options.append(introduced + 1)
        for x in options:
            seq.append(x)
            if find_sequence_formation(seq, r, s) is None:
                dfs(max(introduced, x))
            seq.pop()

    dfs(0)
    return best[0], best[1]


def _pi_search(r: int, s: int, k: int, m: int, cap: int, meter: _Meter) -> tuple[int, list]:
    """Blocks built left to right; every symbol must end with exactly k
    occurrences, and at most ``cap`` symbols are introduced."""
    blocks: list[list[int]] = [[]]
    counts: list[int] = [0]  # counts[x] for x >= 1
    best: list = [0, []]

    def flat() -> list[int]:
        return [x for b in blocks for x in b]

    def done() -> bool:
        return all(c == k for c in counts[1:])

    def feasible() -> bool:
        # each block holds a symbol at most once
        left = m - len(blocks) + 1
        current = set(blocks[-1])
        for x in range(1, len(counts)):
            need = k - counts[x]
            if need > left - (1 if x in current else 0):
                return False
        return True

    def dfs() -> None:
        meter.tick()
        n_sym = len(counts) - 1
        if done() and n_sym > best[0] and all(blocks):
            best[0], best[1] = n_sym, [list(b) for b in blocks]
        if not feasible():
            return
        current = blocks[-1]
        options = [x for x in range(1, n_sym + 1) if counts[x] < k and x not in current]
        if m - len(blocks) + 1 >= k and n_sym < cap:
            options.append(n_sym + 1)
        for x in options:
            if x == n_sym + 1:
                counts.append(0)
            counts[x] += 1
            current.append(x)
            if find_sequence_formation(flat(), r, s) is None:
                dfs()
            current.pop()
            counts[x] -= 1
            if x == n_sym + 1:
                counts.pop()
        if current and len(blocks) < m:
            blocks.append([])
            dfs()
            blocks.pop()

    dfs()
    return best[0], best[1]


def brute_seq_extremal(kind: str, r: int, s: int, size: int, k: Optional[int] = None,
                       budget: SearchBudget = SearchBudget()) -> OracleResult:
    """``kind="F"``: longest r-sparse sequence over ``size`` symbols with no
    (r, s)-formation. ``kind="Pi"``: most symbols in a sequence with no
    (r, s)-formation, at most ``size`` blocks and every symbol at least k times.
    """
    meter = _Meter(budget)
    if kind == "F":
        if min(r, s, size) < 1 or max(r, s) > 3 or size > 4:
            raise CapExceeded("F needs 1 <= r, s <= 3 and 1 <= n <= 4")
        try:
            value, witness = _f_search(r, s, size, meter)
            return OracleResult(value, witness, True, meter.nodes)
        except _Exhausted:
            return OracleResult(None, None, False, meter.nodes, "budget exhausted")
    if kind == "Pi":
        if k is None or min(r, s, k) < 1 or max(r, s, k) > 3 or size > 4:
            raise CapExceeded("Pi needs 1 <= r, s, k <= 3 and m <= 4")
        if k > size:
            return OracleResult(0, [], True, 0, "a symbol needs k distinct blocks")
        if k < s:
            return OracleResult(INFINITE, None, True, 0, "k < s: no symbol can take part in a formation")
        # r symbols on the same k blocks give s troops, so each block set holds < r symbols
        bound = (r - 1) * comb(size, k)
        try:
            value, witness = _pi_search(r, s, k, size, bound, meter)
        except _Exhausted:
            return OracleResult(None, None, False, meter.nodes, "budget exhausted")
        return OracleResult(value, witness, True, meter.nodes, extra={"bound": bound})
    raise ValueError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# Delta_{r,s,k}(m)
# ---------------------------------------------------------------------------


def brute_delta(r: int, s: int, k: int, m: int, budget: SearchBudget = SearchBudget()) -> OracleResult:
    """Most columns in an m-row matrix with >= k ones per column and no doubled (r, s)-formation.

    Removing 1-entries keeps a matrix doubled-formation-free, so columns have
    exactly k ones. Column order plays no role in a formation, hence columns
    form a multiset; r equal columns already hold a doubled formation, so
    multiplicities stay below r.
    """
    if min(r, s, k, m) < 1 or max(r, s, k) > 3 or m > DELTA_CAP:
        raise CapExceeded(f"brute_delta needs 1 <= r, s, k <= 3 and m <= {DELTA_CAP}")
    if s < 2:
        raise ValueError("doubled formations need s >= 2")
    if m < k:
        return OracleResult(0, Matrix01.zeros(m, 0), True, 0, "m < k")
    if k < 2 * s - 2:
        return OracleResult(INFINITE, None, True, 0, "k < 2s - 2: columns cannot host a doubled formation")
    subsets = [sum(1 << (i - 1) for i in c) for c in combinations(range(1, m + 1), k)]
    copies = Matrix01.from_col_masks([subsets[0]] * r, m)
    if find_formation(copies, r, s, "doubled") is None:
        raise AssertionError("r equal columns should form a doubled formation")
    meter = _Meter(budget)
    chosen: list[int] = []
    best: list = [0, []]

    def dfs(start: int, run: int) -> None:
        meter.tick()
        if len(chosen) > best[0]:
            best[0], best[1] = len(chosen), list(chosen)
        for idx in range(start, len(subsets)):
            same = run + 1 if chosen and idx == start and chosen[-1] == subsets[idx] else 1
            if same >= r:
                continue
            chosen.append(subsets[idx])
            host = Matrix01.from_col_masks(chosen, m)
            if find_formation(host, r, s, "doubled") is None:
                dfs(idx, same)
            chosen.pop()

    complete = True
    try:
        dfs(0, 0)
    except _Exhausted:
        complete = False
    witness = Matrix01.from_col_masks(best[1], m)
    bound = (r - 1) * comb(m - s + 1, s - 1) if k == 2 * s - 2 and m >= 2 * s - 2 else None
    return OracleResult(best[0], witness, complete, meter.nodes, extra={"bound": bound})


# ---------------------------------------------------------------------------
# Counterexample hunts
# ---------------------------------------------------------------------------


LEMMAS = ("todslargeeven", "todslargeodd", "form2spl", "onelongerseq")


@dataclass
class HuntReport:
    lemma: str
    params: dict
    candidates: int = 0
    hypothesis_met: int = 0
    violations: list = field(default_factory=list)
    by_source: dict = field(default_factory=dict)
    exhausted: bool = False
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"lemma": self.lemma, "params": self.params, "candidates": self.candidates,
                "hypothesisMet": self.hypothesis_met, "violations": self.violations[:5],
                "violationCount": len(self.violations), "bySource": self.by_source,
                "exhausted": self.exhausted, "elapsed": round(self.elapsed, 3)}


def _random_matrix(rng: random.Random, m: int, n: int, p: float) -> Matrix01:
    return Matrix01(m, n, frozenset((i, j) for i in range(1, m + 1) for j in range(1, n + 1) if rng.random() < p))


def random_ds_sequence(rng: random.Random, s: int, alphabet: int, max_len: int = 60,
                       stop: float = 0.0) -> list[int]:
    """Random walk over sequences with no immediate repetition and no
    alternation of length s + 2; stops when stuck, at ``max_len``, or with
    probability ``stop`` per step."""
    tr = _RunTracker(alphabet)
    seq: list[int] = []
    while len(seq) < max_len:
        prev = seq[-1] if seq else 0
        options = [x for x in range(1, alphabet + 1) if x != prev]
        rng.shuffle(options)
        for x in options:
            grow = tr.growth(x)
            if tr.worst_after(x, grow) < s + 2:
                tr.push(x, grow)
                seq.append(x)
                break
        else:
            break
        if rng.random() < stop:
            break
    return seq


def random_blocking(rng: random.Random, seq: Sequence, extra_cut: float = 0.3) -> BlockedSequence:
    blocks: list[list] = [[]]
    for x in seq:
        if x in blocks[-1] or (blocks[-1] and rng.random() < extra_cut):
            blocks.append([])
        blocks[-1].append(x)
    return BlockedSequence(tuple(tuple(b) for b in blocks if b))


def _plant(rng: random.Random, n_rows: int, members: Sequence[Matrix01], width: int) -> Matrix01:
    cells = set()
    for f in members:
        rows = sorted(rng.sample(range(1, n_rows + 1), f.m))
        cells |= {(rows[r - 1], c) for r, c in f.cells}
    return Matrix01(n_rows, width, frozenset(cells))


def _minimize(rng: random.Random, host: Matrix01, holds: Callable[[Matrix01], bool]) -> Matrix01:
    cells = list(host.cells)
    rng.shuffle(cells)
    for c in cells:
        smaller = host.without_cells([c])
        if holds(smaller):
            host = smaller
    return host


def counterexample_search(lemma: str, param: int = 2, r: int = 2, count: int = 1000, adversarial: int = 200,
                          seed: int = 0, max_rows: int = 10, budget: SearchBudget = SearchBudget()) -> HuntReport:
    """Check a structural lemma on random and adversarial hosts.

    ``param`` is l for the two flattening lemmas and s for form2spl and
    onelongerseq; ``r`` is used by form2spl. Adversarial hosts are planted so
    that the hypothesis holds; for the flattening lemmas they are then
    reduced to an inclusion-minimal host, the hardest case for the conclusion.
    """
    if lemma not in LEMMAS:
        raise ValueError(f"unknown lemma {lemma!r}; choose from {', '.join(LEMMAS)}")
    rng = random.Random(seed)
    deadline = time.monotonic() + budget.time_limit
    rep = HuntReport(lemma, {"param": param, "r": r, "count": count, "adversarial": adversarial, "seed": seed})
    start = time.monotonic()

    if lemma in ("todslargeeven", "todslargeodd"):
        l = param
        if not 1 <= l <= 2:
            raise CapExceeded("flattening lemmas are hunted for l <= 2")
        odd = lemma == "todslargeodd"
        sets = phi_odd(l) if odd else phi(l)
        width = 2 * l + 1 if odd else 2 * l
        lo = max(f.m for fs in sets for f in fs)

        def hypothesis(a: Matrix01) -> bool:
            return all(any(contains_pattern(a, f) is not None for f in fs) for fs in sets)

        def conclusion(a: Matrix01) -> bool:
            if odd:
                return contains_ds(a, width)
            masks = a.col_masks
            return any(_alternation_from_masks(masks[2 * i], masks[2 * i + 1], a.m) >= 2 * l for i in range(l))

        def candidates():
            for _ in range(count):
                rows = rng.randint(max(1, lo - 2), max_rows)
                yield "random", _random_matrix(rng, rows, width, rng.uniform(0.2, 0.9))
            for i in range(adversarial):
                rows = rng.randint(lo, max_rows)
                a = _plant(rng, rows, [rng.choice(sorted(fs, key=lambda f: f.sorted_cells())) for fs in sets], width)
                if i % 2:
                    a = _minimize(rng, a, hypothesis)
                yield "adversarial", a

    elif lemma == "form2spl":
        s = param

        def hypothesis(a: Matrix01) -> bool:
            return find_sequence_formation(mst(a).symbols, s * r, s) is not None

        def conclusion(a: Matrix01) -> bool:
            try:
                return split_formation(a, r, s) is not None
            except Exception:
                return False

        def candidates():
            for _ in range(count):
                yield "random", _random_matrix(rng, rng.randint(1, max_rows), rng.randint(1, max_rows),
                                               rng.uniform(0.1, 0.9))
            for _ in range(adversarial):
                yield "adversarial", _random_matrix(rng, rng.randint(s, max_rows), rng.randint(s * r, max_rows),
                                                    rng.uniform(0.7, 1.0))

    else:  # onelongerseq
        s = param

        def hypothesis(seq: BlockedSequence) -> bool:
            return is_ds_sequence(seq.symbols, s)

        def conclusion(seq: BlockedSequence) -> bool:
            return not contains_ds(smt(seq), s + 1)

        def candidates():
            for _ in range(count):
                seq = random_ds_sequence(rng, s, rng.randint(1, 12), stop=rng.uniform(0.0, 0.1))
                yield "random", random_blocking(rng, seq, rng.uniform(0.0, 0.5))
            for _ in range(adversarial):
                # walks run until stuck: the longest sequences reachable
                seq = random_ds_sequence(rng, s, rng.randint(2, 12), max_len=200)
                yield "adversarial", random_blocking(rng, seq, 0.0)

    for source, cand in candidates():
        if time.monotonic() > deadline:
            rep.exhausted = True
            break
        rep.candidates += 1
        stats = rep.by_source.setdefault(source, {"candidates": 0, "hypothesisMet": 0})
        stats["candidates"] += 1
        if not hypothesis(cand):
            continue
        rep.hypothesis_met += 1
        stats["hypothesisMet"] += 1
        if not conclusion(cand):
            if isinstance(cand, Matrix01):
                rep.violations.append({"m": cand.m, "n": cand.n, "grid": cand.to_grid()})
            else:
                rep.violations.append([list(b) for b in cand.blocks])
    rep.elapsed = time.monotonic() - start
    return rep

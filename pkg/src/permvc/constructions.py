"""Lower-bound constructions: SMT, J2-expansions and their flattenings,
tile-and-pad amplification, and the permutation-family builder."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import permutations, product
from math import prod
from typing import Hashable, Optional, Sequence

from .core import BlockedSequence, Matrix01, PermFamily, Permutation
from .patterns import is_ds_sequence

PHI_CAP = 4


def smt(seq: BlockedSequence) -> Matrix01:
    """Blocks become rows, symbols (numbered by first appearance) become columns."""
    number: dict[Hashable, int] = {}
    for x in seq.symbols:
        number.setdefault(x, len(number) + 1)
    cells = {(i, number[x]) for i, block in enumerate(seq.blocks, 1) for x in block}
    return Matrix01(len(seq.blocks), len(number), frozenset(cells))


# ---------------------------------------------------------------------------
# J2-expansions
# ---------------------------------------------------------------------------


def _as_perm(p) -> Permutation:
    return p if isinstance(p, Permutation) else Permutation(tuple(p))


def j2_expand(p, drop: Optional[int] = None) -> Matrix01:
    """Replace each 1-entry of the permutation matrix of p by J2.

    With ``drop = i`` an extra bottom row with its 1 in column i is added,
    shifting columns i.. one place to the right.
    """
    p = _as_perm(p)
    l = p.n
    cells = set()
    for j, v in enumerate(p.image, 1):
        cells.add((2 * v - 1, 2 * j))
        cells.add((2 * v, 2 * j - 1))
    if drop is None:
        return Matrix01(2 * l, 2 * l, frozenset(cells))
    if not 1 <= drop <= 2 * l + 1:
        raise ValueError(f"drop column must be in [1..{2 * l + 1}], got {drop}")
    shifted = {(r, c + 1 if c >= drop else c) for r, c in cells}
    shifted.add((2 * l + 1, drop))
    return Matrix01(2 * l + 1, 2 * l + 1, frozenset(shifted))


def contractible_pairs(matrix: Matrix01) -> list[int]:
    """Even rows 2i such that rows 2i, 2i+1 are contractible."""
    rows = matrix.rows
    out = []
    for r in range(2, matrix.m, 2):
        a, b = rows[r - 1], rows[r]
        if a and b and a[0] < b[0]:
            out.append(r)
    return out


def contract(matrix: Matrix01, pairs: Sequence[int]) -> Matrix01:
    """Merge each row 2i listed in ``pairs`` with row 2i+1."""
    merge = set(pairs)
    new_index, k = {}, 0
    for r in range(1, matrix.m + 1):
        if r - 1 in merge:
            new_index[r] = k
        else:
            k += 1
            new_index[r] = k
    cells = {(new_index[r], c) for r, c in matrix.cells}
    return Matrix01(k, matrix.n, frozenset(cells))


def flattenings(p, drop: Optional[int] = None) -> frozenset[Matrix01]:
    """All function matrices obtained by contracting some contractible pairs."""
    base = j2_expand(p, drop)
    pairs = contractible_pairs(base)
    out = set()
    for mask in range(1 << len(pairs)):
        chosen = [r for i, r in enumerate(pairs) if mask >> i & 1]
        out.add(contract(base, chosen))
    return frozenset(out)


def phi(l: int, drop: Optional[int] = None, cap: int = PHI_CAP) -> list[frozenset[Matrix01]]:
    """One flattening set per l-permutation, in lexicographic order of the permutations."""
    if l < 1:
        raise ValueError("phi needs l >= 1")
    if l > cap:
        raise ValueError(f"phi({l}) exceeds the cap {cap}; pass a larger cap explicitly")
    return [flattenings(Permutation(p), drop) for p in permutations(range(1, l + 1))]


def phi_odd(l: int, cap: int = PHI_CAP) -> list[frozenset[Matrix01]]:
    """All sets F(P^J2, i) for l-permutations P and i in [2l+1]."""
    return [s for i in range(1, 2 * l + 2) for s in phi(l, i, cap)]


# ---------------------------------------------------------------------------
# Amplification
# ---------------------------------------------------------------------------


def tile_and_pad(block: Matrix01, n: int) -> Matrix01:
    """Block-diagonal copies of ``block`` cut to n columns and padded to n x n.

    Surplus columns are cut from the right. Rows left empty by that cut are
    dropped (they carried no entries of kept columns); then empty rows are
    appended at the bottom.
    """
    a, b = block.m, block.n
    if b < 1 or n < 1:
        raise ValueError("need a block with columns and n >= 1")
    if b > n:
        raise ValueError(f"block has {b} columns, more than n={n}")
    copies = -(-n // b)
    rows: list[list[int]] = []
    originally_empty: list[bool] = []
    for k in range(copies):
        for row in block.rows:
            rows.append([c + k * b for c in row if c + k * b <= n])
            originally_empty.append(not row)
    rows = [r for r, empty in zip(rows, originally_empty) if r or empty]
    if len(rows) > n:
        raise ValueError(f"block too large for n={n}: {len(rows)} rows after placement")
    rows += [[] for _ in range(n - len(rows))]
    return Matrix01.from_rows(rows, n)


# ---------------------------------------------------------------------------
# Family builder
# ---------------------------------------------------------------------------


def inflate(values: Sequence[int]) -> Permutation:
    """Permutation whose i-th 1-entry (by row, then column) sits in row i."""
    order = sorted(range(len(values)), key=lambda j: (values[j], j))
    image = [0] * len(values)
    for i, j in enumerate(order, 1):
        image[j] = i
    return Permutation(tuple(image))


def compress_rows(values: Sequence[int]) -> tuple[int, ...]:
    """Function values after deleting empty rows of the function matrix."""
    rank = {v: i for i, v in enumerate(sorted(set(values)), 1)}
    return tuple(rank[v] for v in values)


def recontract(p: Permutation, values: Sequence[int]) -> tuple[int, ...]:
    """Contract the row intervals of p that came from one row of ``values``.

    Inflation sends row r of the function matrix to a consecutive interval of
    rows; reading, for each column j, which interval p(j) falls into recovers
    the compressed function values.
    """
    compressed = compress_rows(values)
    sizes: dict[int, int] = {}
    for v in compressed:
        sizes[v] = sizes.get(v, 0) + 1
    start, bounds = 0, []
    for v in sorted(sizes):
        bounds.append((start + 1, start + sizes[v], v))
        start += sizes[v]
    out = []
    for x in p.image:
        out.append(next(v for lo, hi, v in bounds if lo <= x <= hi))
    return tuple(out)


@dataclass
class FamilyBuild:
    family: PermFamily
    complete: bool  # False when the budget cut the enumeration short
    choices: int
    origins: dict = field(default_factory=dict)  # Permutation -> set of compressed function tuples

    def max_preimages(self) -> int:
        return max((len(v) for v in self.origins.values()), default=0)


def build_family(source: Matrix01, sampler: str = "exhaustive", budget: int = 100_000,
                 seed: Optional[int] = None) -> FamilyBuild:
    """Permutations obtained by picking one 1-entry per column, dropping empty
    rows and inflating every row into a diagonal."""
    cols = source.cols
    if any(not c for c in cols):
        raise ValueError("every column of the source must hold a 1-entry")
    origins: dict[Permutation, set] = {}

    def take(values: Sequence[int]) -> None:
        p = inflate(values)
        origins.setdefault(p, set()).add(compress_rows(values))

    total = prod(len(c) for c in cols)
    if sampler == "exhaustive":
        complete, seen = True, 0
        for values in product(*cols):
            if seen == budget:
                complete = False
                break
            take(values)
            seen += 1
    elif sampler == "random":
        rng = random.Random(seed)
        seen = min(budget, total)
        for _ in range(seen):
            take([rng.choice(c) for c in cols])
        complete = False
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    fam = PermFamily(source.n, tuple(origins))
    return FamilyBuild(fam, complete, seen, origins)


# ---------------------------------------------------------------------------
# ababa-free input sequences
# ---------------------------------------------------------------------------


class Infeasible(ValueError):
    """No sequence with the requested parameters exists."""


class BudgetExhausted(RuntimeError):
    """A search ran out of nodes before it could decide."""


def _ds3_search(n: int, multiplicity: int, limit: int) -> tuple[Optional[list[int]], int]:
    """Exhaustive DFS; returns (sequence or None, nodes used). Raises BudgetExhausted."""
    remaining = [multiplicity] * (n + 1)
    runs = [[0] * (n + 1) for _ in range(n + 1)]  # runs of the sequence restricted to {x, y}
    last = [-1] * (n + 1)
    seq: list[int] = []
    length = n * multiplicity
    nodes = 0

    def dfs(introduced: int) -> bool:
        nonlocal nodes
        if len(seq) == length:
            return True
        nodes += 1
        if nodes > limit:
            raise BudgetExhausted(f"ababa-free search over {n} symbols exceeded {limit} nodes")
        prev = seq[-1] if seq else 0
        options = [x for x in range(1, introduced + 1) if remaining[x] and x != prev]
        options.sort(key=lambda x: -last[x])
        if introduced < n:
            options.append(introduced + 1)
        for x in options:
            fresh = last[x] < 0
            if fresh:
                grow = [y for y in range(1, n + 1) if last[y] >= 0]
            else:
                grow = [y for y in range(1, n + 1) if y != x and last[y] > last[x]]
                if any(runs[x][y] >= 4 for y in grow):
                    continue
            step = 2 if fresh else 1
            for y in grow:
                runs[x][y] += step
                runs[y][x] = runs[x][y]
            old = last[x]
            last[x] = len(seq)
            seq.append(x)
            remaining[x] -= 1
            if dfs(max(introduced, x)):
                return True
            remaining[x] += 1
            seq.pop()
            last[x] = old
            for y in grow:
                runs[x][y] -= step
                runs[y][x] = runs[x][y]
        return False

    found = dfs(0)
    return (list(seq) if found else None), nodes


def gen_ds3(n: int, multiplicity: int, node_limit: int = 500_000, attempt_limit: int = 20_000) -> BlockedSequence:
    """An ababa-free sequence in which each of n symbols appears ``multiplicity`` times.

    A depth-first search tracks, for every pair of symbols, the number of runs
    of the sequence restricted to that pair. When one search attempt runs out
    of nodes, n is split into two parts solved separately and concatenated:
    symbols of different parts alternate at most twice. If no split works the
    remaining budget goes to one long direct search. The result is cut
    greedily into blocks.
    """
    if n < 1 or multiplicity < 1:
        raise ValueError("need n >= 1 and multiplicity >= 1")
    if multiplicity == 1:
        return BlockedSequence((tuple(range(1, n + 1)),))
    spent = 0
    memo: dict[int, Optional[list[int]]] = {}  # None: proved infeasible
    UNKNOWN = object()

    def solve(k: int):
        nonlocal spent
        if k in memo:
            return memo[k]
        if k == 1:
            memo[k] = None
            return None
        budget = min(attempt_limit, node_limit - spent)
        try:
            seq, used = _ds3_search(k, multiplicity, budget)
            spent += used
            memo[k] = seq
            return seq
        except BudgetExhausted:
            spent += budget
        for a in range(k // 2, 1, -1):
            if spent >= node_limit:
                break
            left = solve(a)
            right = solve(k - a) if isinstance(left, list) else None
            if isinstance(left, list) and isinstance(right, list):
                memo[k] = left + [x + a for x in right]
                return memo[k]
        memo[k] = UNKNOWN
        return UNKNOWN

    seq = solve(n)
    if seq is UNKNOWN and node_limit - spent > attempt_limit:
        # splitting did not help: spend what is left on one long direct search
        seq, _ = _ds3_search(n, multiplicity, node_limit - spent)
    if seq is UNKNOWN:
        raise BudgetExhausted(f"gen_ds3({n}, {multiplicity}) undecided within {node_limit} nodes")
    if seq is None:
        raise Infeasible(f"no ababa-free sequence over {n} symbols with multiplicity {multiplicity}")
    out = BlockedSequence.greedy(seq)
    if not is_ds_sequence(out.symbols, 3):
        raise AssertionError("generated sequence contains ababa")
    return out


def ds4_free_source(n: int, symbols: int, multiplicity: int) -> Matrix01:
    """gen_ds3 -> smt -> tile_and_pad: an n x n matrix avoiding DS_4."""
    return tile_and_pad(smt(gen_ds3(symbols, multiplicity)), n)

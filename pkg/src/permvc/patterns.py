"""Pattern containment, formations and the matrix -> sequence transformation."""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Optional, Sequence

from .core import (
    BlockedSequence,
    FormationWitness,
    Matrix01,
    RowPartition,
    interval_demand,
    validate_witness,
)


@dataclass(frozen=True)
class Embedding:
    """Host rows and columns onto which pattern rows/columns are mapped."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]

    def to_json(self) -> dict:
        return {"rows": list(self.rows), "cols": list(self.cols)}


def ds_matrix(s: int) -> Matrix01:
    """The s x 2 matrix with a 1 at (i, j) exactly when i + j is odd."""
    if s < 1:
        raise ValueError(f"ds_matrix needs s >= 1, got {s}")
    return Matrix01(s, 2, frozenset((i, 2 if i % 2 else 1) for i in range(1, s + 1)))


J2 = Matrix01(2, 2, frozenset({(1, 2), (2, 1)}))


# ---------------------------------------------------------------------------
# Containment
# ---------------------------------------------------------------------------


def _greedy_rows(host_rows: Sequence[int], needs: Sequence[int]) -> Optional[list[int]]:
    """Earliest increasing host rows whose masks cover each needed mask.

    Earliest placement is optimal because each pattern row only constrains
    its own host row.
    """
    out, r, m, k = [], 0, len(host_rows), len(needs)
    for i, need in enumerate(needs):
        while r < m and host_rows[r] & need != need:
            r += 1
        if r > m - (k - i):
            return None
        out.append(r + 1)
        r += 1
    return out


def contains_pattern(host: Matrix01, pattern: Matrix01, columns: Optional[Sequence[int]] = None) -> Optional[Embedding]:
    """Find the lexicographically least embedding of ``pattern`` into ``host``.

    When ``columns`` is given the pattern columns must map onto exactly those
    host columns (in order). Returns None when the host avoids the pattern.
    """
    k, l = pattern.m, pattern.n
    if k > host.m or l > host.n:
        return None
    host_rows = host.row_masks
    prow = pattern.rows
    pcol_need = [len(c) for c in pattern.cols]
    host_cnt = [len(c) for c in host.cols]

    def needs_for(cols: Sequence[int]) -> list[int]:
        t = len(cols)
        return [sum(1 << (cols[c - 1] - 1) for c in row if c <= t) for row in prow]

    if columns is not None:
        cols = tuple(columns)
        if len(cols) != l:
            raise ValueError("column selection must match the pattern width")
        rows = _greedy_rows(host_rows, needs_for(cols))
        return Embedding(tuple(rows), cols) if rows is not None else None

    chosen: list[int] = []

    def dfs(start: int) -> Optional[Embedding]:
        j = len(chosen)
        if j == l:
            rows = _greedy_rows(host_rows, needs_for(chosen))
            return Embedding(tuple(rows), tuple(chosen)) if rows is not None else None
        for c in range(start, host.n - (l - j - 1) + 1):
            if host_cnt[c - 1] < pcol_need[j]:
                continue
            chosen.append(c)
            if _greedy_rows(host_rows, needs_for(chosen)) is not None:
                hit = dfs(c + 1)
                if hit is not None:
                    return hit
            chosen.pop()
        return None

    return dfs(1)


def alternation_in_columns(host: Matrix01, left: int, right: int) -> int:
    """Longest alternation of rows between two columns that starts in ``right``.

    ``host`` contains DS_s on columns (left, right) iff this is >= s.
    """
    return _alternation_from_masks(host.col_masks[left - 1], host.col_masks[right - 1], host.m)


def _alternation_from_masks(left: int, right: int, m: int) -> int:
    length, want_right = 0, True
    for i in range(m):
        bit = 1 << i
        if want_right and right & bit:
            length += 1
            want_right = False
        elif not want_right and left & bit:
            length += 1
            want_right = True
    return length


def contains_ds(host: Matrix01, s: int) -> bool:
    """Fast containment test for ``ds_matrix(s)``."""
    masks, m = host.col_masks, host.m
    for a, b in combinations(range(host.n), 2):
        if _alternation_from_masks(masks[a], masks[b], m) >= s:
            return True
    return False


# ---------------------------------------------------------------------------
# Formations in matrices
# ---------------------------------------------------------------------------


def _greedy_partition(col_rows: Sequence[Sequence[int]], demand: Sequence[int], m: int) -> Optional[list[int]]:
    """Earliest interval ends such that every column meets ``demand``.

    Returns the list of interval end rows (last one equal to m), or None.
    Ending each interval as early as possible never hurts later intervals,
    so this is both a complete test and the lexicographically least choice.
    """
    ends, start = [], 1
    s = len(demand)
    for k, need in enumerate(demand):
        if k == s - 1:
            for rows in col_rows:
                if len(rows) - bisect_left(rows, start) < need:
                    return None
            ends.append(m)
            return ends
        end = start
        for rows in col_rows:
            idx = bisect_left(rows, start) + need - 1
            if idx >= len(rows):
                return None
            end = max(end, rows[idx])
        ends.append(end)
        start = end + 1
        if start > m:
            return None
    return ends


def _check_params(r: int, s: int, mode: str, B: int) -> list[int]:
    if r < 1 or s < 1 or B < 1:
        raise ValueError(f"need r, s, B >= 1 (got r={r}, s={s}, B={B})")
    return interval_demand(mode, s, B)


def formation_on_columns(host: Matrix01, columns: Sequence[int], s: int, mode: str = "plain", B: int = 1) -> Optional[FormationWitness]:
    """Witness on exactly these columns, or None if no s-partition works."""
    demand = _check_params(len(columns), s, mode, B)
    col_rows = [host.cols[c - 1] for c in columns]
    ends = _greedy_partition(col_rows, demand, host.m)
    if ends is None:
        return None
    part = RowPartition.from_ends(ends)
    cells = set()
    for c, rows in zip(columns, col_rows):
        for (lo, _hi), need in zip(part.intervals, demand):
            i = bisect_left(rows, lo)
            cells.update((r, c) for r in rows[i:i + need])
    return FormationWitness(tuple(columns), part, frozenset(cells), mode, B)


def find_formation(host: Matrix01, r: int, s: int, mode: str = "plain", B: int = 1) -> Optional[FormationWitness]:
    """Lexicographically least (r, s)-formation of the given mode, or None.

    Columns are chosen depth first in increasing order; a partial column set
    is extended only while it still admits a valid partition, which is
    necessary for every extension.
    """
    demand = _check_params(r, s, mode, B)
    total = sum(demand)
    cols = host.cols
    usable = [c for c in range(1, host.n + 1) if len(cols[c - 1]) >= total]
    if len(usable) < r:
        return None
    chosen: list[int] = []

    def dfs(pos: int) -> bool:
        if len(chosen) == r:
            return True
        for idx in range(pos, len(usable) - (r - len(chosen)) + 1):
            chosen.append(usable[idx])
            if _greedy_partition([cols[c - 1] for c in chosen], demand, host.m) is not None and dfs(idx + 1):
                return True
            chosen.pop()
        return False

    if not dfs(0):
        return None
    return formation_on_columns(host, chosen, s, mode, B)


def widest_formation(host: Matrix01, s: int, mode: str = "plain", B: int = 1) -> Optional[FormationWitness]:
    """The formation with the most columns (lexicographically least among those)."""
    for r in range(host.n, 0, -1):
        w = find_formation(host, r, s, mode, B)
        if w is not None:
            return w
    return None


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------


def symbol_key(x):
    """Sort key putting integer symbols first, in numeric order."""
    return (0, x, "") if isinstance(x, int) else (1, 0, str(x))


def mst(matrix: Matrix01) -> BlockedSequence:
    """Read the matrix row by row, writing the column index of each 1-entry."""
    return BlockedSequence(tuple(row for row in matrix.rows if row))


def sparsify(seq: Sequence[Hashable], r: int) -> tuple[list, int]:
    """Make ``seq`` r-sparse by repeatedly cutting out positions i..j-1.

    (i, j) is the leftmost violation: the smallest j whose symbol already
    occurred at some i with j - i < r, taking the closest such i.
    """
    if r < 2:
        raise ValueError("sparsify needs r >= 2")
    out = list(seq)
    removed = 0
    while True:
        last: dict = {}
        for j, x in enumerate(out):
            i = last.get(x)
            if i is not None and j - i < r:
                del out[i:j]
                removed += j - i
                break
            last[x] = j
        else:
            return out, removed


def is_sparse(seq: Sequence[Hashable], r: int) -> bool:
    last: dict = {}
    for j, x in enumerate(seq):
        if x in last and j - last[x] < r:
            return False
        last[x] = j
    return True


def alternation_length(seq: Sequence[Hashable], a: Hashable, b: Hashable) -> int:
    """Length of the longest alternation of a and b (either first) in seq."""
    runs, prev = 0, None
    for x in seq:
        if (x == a or x == b) and x != prev:
            runs += 1
            prev = x
    return runs


def max_alternation(seq: Sequence[Hashable]) -> int:
    symbols = sorted(set(seq), key=symbol_key)
    best = 1 if seq else 0
    for a, b in combinations(symbols, 2):
        best = max(best, alternation_length(seq, a, b))
    return best


def is_ds_sequence(seq: Sequence[Hashable], s: int) -> bool:
    """No immediate repetition and no alternation a..b..a.. of length s + 2."""
    if s < 1:
        raise ValueError("is_ds_sequence needs s >= 1")
    seq = list(seq)
    if any(x == y for x, y in zip(seq, seq[1:])):
        return False
    counts: dict = {}
    for x in seq:
        counts[x] = counts.get(x, 0) + 1
    symbols = sorted(counts, key=symbol_key)
    for a, b in combinations(symbols, 2):
        if counts[a] + counts[b] < s + 2:
            continue
        if alternation_length(seq, a, b) >= s + 2:
            return False
    return True


@dataclass(frozen=True)
class SequenceFormation:
    """Symbols of an (r, s)-formation in a sequence and the positions of each troop."""

    symbols: tuple
    troops: tuple[tuple[tuple[Hashable, int], ...], ...]  # per troop: (symbol, position) in order


def _greedy_troops(seq: Sequence[Hashable], symbols: frozenset, s: int, want_positions: bool = False):
    troops, current, need = [], [], set(symbols)
    for pos, x in enumerate(seq):
        if x in need:
            need.discard(x)
            if want_positions:
                current.append((x, pos))
            if not need:
                troops.append(tuple(current))
                if len(troops) == s:
                    return troops if want_positions else True
                current, need = [], set(symbols)
    return None if want_positions else False


def find_sequence_formation(seq: Sequence[Hashable], r: int, s: int) -> Optional[SequenceFormation]:
    """An (r, s)-formation occurring as a subsequence, or None.

    Troops are taken greedily (each ends as early as possible), which is
    optimal for a fixed symbol set. Symbol sets are searched in sorted order
    and grown only while still feasible.
    """
    if r < 1 or s < 1:
        raise ValueError("need r, s >= 1")
    seq = list(seq)
    counts: dict = {}
    for x in seq:
        counts[x] = counts.get(x, 0) + 1
    cand = sorted((x for x, c in counts.items() if c >= s), key=symbol_key)
    if len(cand) < r:
        return None
    chosen: list = []

    def dfs(pos: int) -> bool:
        if len(chosen) == r:
            return True
        for idx in range(pos, len(cand) - (r - len(chosen)) + 1):
            chosen.append(cand[idx])
            if _greedy_troops(seq, frozenset(chosen), s) and dfs(idx + 1):
                return True
            chosen.pop()
        return False

    if not dfs(0):
        return None
    troops = _greedy_troops(seq, frozenset(chosen), s, want_positions=True)
    return SequenceFormation(tuple(chosen), tuple(troops))


def split_formation(host: Matrix01, r: int, s: int) -> Optional[FormationWitness]:
    """Turn an (s*r, s)-formation of ``mst(host)`` into an (r, s)-formation of host.

    The last symbol of each troop but the final one is "bad"; sorting the bad
    symbols cuts the column range into s groups, one of which holds at least
    r formation symbols. Inside that group every troop fits strictly between
    consecutive cuts, which fixes the row partition.
    """
    if r < 1 or s < 1:
        raise ValueError("need r, s >= 1")
    seq = mst(host)
    symbols = seq.symbols
    row_of = [i for i, block in enumerate(seq.blocks) for _ in block]
    # blocks skip empty rows; map block index back to the host row
    host_rows = [i for i, row in enumerate(host.rows, 1) if row]
    row_of = [host_rows[b] for b in row_of]
    form = find_sequence_formation(symbols, s * r, s)
    if form is None:
        return None
    last = [troop[-1] for troop in form.troops]  # (symbol, position)
    bad = sorted(sym for sym, _ in last[:-1])
    bounds = [0] + bad + [host.n]
    in_form = sorted(form.symbols)
    for i in range(1, s + 1):
        group = [g for g in in_form if bounds[i - 1] < g <= bounds[i]]
        if len(group) >= r:
            break
    else:  # pragma: no cover - pigeonhole makes this unreachable
        raise AssertionError("no group of size r; pigeonhole violated")
    cols = tuple(group[:r])
    ends = []
    for sym, pos in last[:-1]:
        row = row_of[pos]
        ends.append(row if sym >= bounds[i] else row - 1)
    ends.append(host.m)
    part = RowPartition.from_ends(ends)
    keep = set(cols)
    cells = frozenset((row_of[pos], sym) for troop in form.troops for sym, pos in troop if sym in keep)
    w = FormationWitness(cols, part, cells, "plain", 1)
    validate_witness(host, w)
    return w

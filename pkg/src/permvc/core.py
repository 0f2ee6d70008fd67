"""Domain types shared by every module, and the text formats they travel in.

All indices are 1-based and row 1 is the top row. Matrices store their
1-entries as a frozen set of ``(row, col)`` pairs; bitmask views (bit
``j - 1`` for column ``j``, bit ``i - 1`` for row ``i``) are derived lazily
for the search code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence


class InvariantError(ValueError):
    """A value violates the invariants of its type."""


class FormatError(ValueError):
    """Malformed input text. ``line`` is 1-based (0 when not line specific)."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


# ---------------------------------------------------------------------------
# Permutations
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Permutation:
    """A bijection on ``{1..n}``; ``image[j - 1]`` is the value at position j."""

    image: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(int(v) for v in self.image))
        validate_permutation(self)

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, j: int) -> int:
        return self.image[j - 1]

    def __len__(self) -> int:
        return len(self.image)

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for j, v in enumerate(self.image, 1):
            inv[v - 1] = j
        return Permutation(tuple(inv))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    def __str__(self) -> str:
        return " ".join(map(str, self.image))


def validate_permutation(p: Permutation) -> None:
    n = len(p.image)
    if n < 1:
        raise InvariantError("permutation must have size >= 1")
    if sorted(p.image) != list(range(1, n + 1)):
        raise InvariantError(f"not a bijection on [1..{n}]: {p.image}")


# ---------------------------------------------------------------------------
# (0,1)-matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Matrix01:
    """An ``m x n`` (0,1)-matrix given by its set of 1-cells."""

    m: int
    n: int
    cells: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "cells", frozenset((int(r), int(c)) for r, c in self.cells))
        validate_matrix(self)

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Iterable[int]], n: int) -> "Matrix01":
        """Build from a list of per-row column collections (row 1 first)."""
        cells = {(i, c) for i, row in enumerate(rows, 1) for c in row}
        return cls(len(rows), n, frozenset(cells))

    @classmethod
    def from_grid(cls, lines: Sequence[str]) -> "Matrix01":
        """Build from strings of '0'/'1' (or '.'/'x'), one per row."""
        m = len(lines)
        n = len(lines[0]) if m else 0
        cells = {(i, j) for i, line in enumerate(lines, 1) for j, ch in enumerate(line, 1) if ch in "1x"}
        return cls(m, n, frozenset(cells))

    @classmethod
    def from_col_masks(cls, masks: Sequence[int], m: int) -> "Matrix01":
        cells = {(i + 1, j) for j, mask in enumerate(masks, 1) for i in range(m) if mask >> i & 1}
        return cls(m, len(masks), frozenset(cells))

    @classmethod
    def zeros(cls, m: int, n: int) -> "Matrix01":
        return cls(m, n, frozenset())

    @classmethod
    def ones(cls, m: int, n: int) -> "Matrix01":
        return cls(m, n, frozenset((i, j) for i in range(1, m + 1) for j in range(1, n + 1)))

    @classmethod
    def identity(cls, n: int) -> "Matrix01":
        return cls(n, n, frozenset((i, i) for i in range(1, n + 1)))

    # -- derived views ----------------------------------------------------
    @cached_property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        """Sorted column indices of the 1-entries of each row."""
        out = [[] for _ in range(self.m)]
        for r, c in self.cells:
            out[r - 1].append(c)
        return tuple(tuple(sorted(x)) for x in out)

    @cached_property
    def cols(self) -> tuple[tuple[int, ...], ...]:
        """Sorted row indices of the 1-entries of each column."""
        out = [[] for _ in range(self.n)]
        for r, c in self.cells:
            out[c - 1].append(r)
        return tuple(tuple(sorted(x)) for x in out)

    @cached_property
    def row_masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << (c - 1) for c in row) for row in self.rows)

    @cached_property
    def col_masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << (r - 1) for r in col) for col in self.cols)

    @property
    def count(self) -> int:
        return len(self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def __contains__(self, cell) -> bool:
        return tuple(cell) in self.cells

    def col_counts(self) -> list[int]:
        return [len(c) for c in self.cols]

    def to_grid(self) -> list[str]:
        grid = [["0"] * self.n for _ in range(self.m)]
        for r, c in self.cells:
            grid[r - 1][c - 1] = "1"
        return ["".join(row) for row in grid]

    def sorted_cells(self) -> list[tuple[int, int]]:
        return sorted(self.cells)

    def with_cells(self, extra: Iterable[tuple[int, int]]) -> "Matrix01":
        return Matrix01(self.m, self.n, self.cells | frozenset(extra))

    def without_cells(self, gone: Iterable[tuple[int, int]]) -> "Matrix01":
        return Matrix01(self.m, self.n, self.cells - frozenset(gone))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix01":
        rpos = {r: i for i, r in enumerate(rows, 1)}
        cpos = {c: j for j, c in enumerate(cols, 1)}
        cells = {(rpos[r], cpos[c]) for r, c in self.cells if r in rpos and c in cpos}
        return Matrix01(len(rows), len(cols), frozenset(cells))

    def __str__(self) -> str:
        return "\n".join(self.to_grid())


def validate_matrix(a: Matrix01) -> None:
    if a.m < 0 or a.n < 0:
        raise InvariantError(f"negative dimensions {a.m}x{a.n}")
    for r, c in a.cells:
        if not (1 <= r <= a.m and 1 <= c <= a.n):
            raise InvariantError(f"cell {(r, c)} outside {a.m}x{a.n}")


def is_permutation_matrix(a: Matrix01) -> bool:
    return a.m == a.n and all(len(r) == 1 for r in a.rows) and all(len(c) == 1 for c in a.cols)


def is_function_matrix(a: Matrix01) -> bool:
    return all(len(c) == 1 for c in a.cols)


def validate_permutation_matrix(a: Matrix01) -> None:
    if not is_permutation_matrix(a):
        raise InvariantError("not a permutation matrix")


def validate_function_matrix(a: Matrix01) -> None:
    if not is_function_matrix(a):
        raise InvariantError("not a function matrix (need exactly one 1 per column)")


def perm_to_matrix(p: Permutation) -> Matrix01:
    """Cell (i, j) is present iff p(j) = i."""
    return Matrix01(p.n, p.n, frozenset((v, j) for j, v in enumerate(p.image, 1)))


def matrix_to_perm(a: Matrix01) -> Permutation:
    validate_permutation_matrix(a)
    return Permutation(tuple(col[0] for col in a.cols))


def function_matrix(values: Sequence[int], m: int) -> Matrix01:
    """Function matrix G_f with G(i, j) = 1 iff f(j) = i."""
    return Matrix01(m, len(values), frozenset((v, j) for j, v in enumerate(values, 1)))


def function_values(a: Matrix01) -> tuple[int, ...]:
    validate_function_matrix(a)
    return tuple(col[0] for col in a.cols)


# ---------------------------------------------------------------------------
# Blocked sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockedSequence:
    """A sequence cut into blocks, each block holding distinct symbols."""

    blocks: tuple[tuple[Hashable, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))
        validate_blocked_sequence(self)

    @classmethod
    def greedy(cls, symbols: Sequence[Hashable]) -> "BlockedSequence":
        """Cut into maximal blocks, opening a new block only on a repeat."""
        blocks: list[list] = []
        seen: set = set()
        for x in symbols:
            if not blocks or x in seen:
                blocks.append([])
                seen = set()
            blocks[-1].append(x)
            seen.add(x)
        return cls(tuple(tuple(b) for b in blocks))

    @property
    def symbols(self) -> tuple:
        return tuple(x for b in self.blocks for x in b)

    @property
    def block_bounds(self) -> tuple[int, ...]:
        """Positions (0-based, into ``symbols``) at which blocks 2.. start."""
        out, pos = [], 0
        for b in self.blocks[:-1]:
            pos += len(b)
            out.append(pos)
        return tuple(out)

    @property
    def alphabet_size(self) -> int:
        return len(set(self.symbols))

    def __len__(self) -> int:
        return sum(len(b) for b in self.blocks)

    def __str__(self) -> str:
        return serialize_sequence(self).strip()


def validate_blocked_sequence(s: BlockedSequence) -> None:
    for i, b in enumerate(s.blocks, 1):
        if not b:
            raise InvariantError(f"block {i} is empty")
        if len(set(b)) != len(b):
            raise InvariantError(f"block {i} repeats a symbol: {b}")


# ---------------------------------------------------------------------------
# Formations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RowPartition:
    """Contiguous intervals ``(lo, hi)`` covering rows ``1..m`` in order."""

    intervals: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple((int(a), int(b)) for a, b in self.intervals))

    @property
    def s(self) -> int:
        return len(self.intervals)

    def index_of(self, row: int) -> int:
        """0-based index of the interval containing ``row`` (-1 if none)."""
        for k, (lo, hi) in enumerate(self.intervals):
            if lo <= row <= hi:
                return k
        return -1

    @classmethod
    def from_ends(cls, ends: Sequence[int]) -> "RowPartition":
        """Partition whose intervals end at the given rows (last one = m)."""
        out, lo = [], 1
        for hi in ends:
            out.append((lo, hi))
            lo = hi + 1
        return cls(tuple(out))


def validate_partition(p: RowPartition, m: int) -> None:
    if not p.intervals:
        raise InvariantError("partition has no intervals")
    expect = 1
    for lo, hi in p.intervals:
        if lo != expect or hi < lo:
            raise InvariantError(f"intervals not contiguous/ordered: {p.intervals}")
        expect = hi + 1
    if expect != m + 1:
        raise InvariantError(f"intervals do not cover rows 1..{m}: {p.intervals}")


MODES = ("plain", "doubled", "fat")


def interval_demand(mode: str, s: int, B: int = 1) -> list[int]:
    """Required witness cells per column in each of the s intervals."""
    if mode == "plain":
        return [1] * s
    if mode == "fat":
        return [B] * s
    if mode == "doubled":
        if s < 2:
            raise ValueError("doubled formations need s >= 2")
        return [1] + [2] * (s - 2) + [1]
    raise ValueError(f"unknown formation mode {mode!r}")


@dataclass(frozen=True)
class FormationWitness:
    columns: tuple[int, ...]
    partition: RowPartition
    cells: frozenset
    mode: str = "plain"
    B: int = 1

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "cells", frozenset(tuple(c) for c in self.cells))

    @property
    def r(self) -> int:
        return len(self.columns)

    @property
    def s(self) -> int:
        return self.partition.s

    def to_json(self) -> dict:
        return {
            "columns": list(self.columns),
            "partition": [list(iv) for iv in self.partition.intervals],
            "cells": [list(c) for c in sorted(self.cells)],
            "mode": self.mode,
            "B": self.B,
        }


def validate_witness(host: Matrix01, w: FormationWitness) -> None:
    """Raise InvariantError unless ``w`` is a genuine formation inside ``host``."""
    cols = w.columns
    if not cols or any(b <= a for a, b in zip(cols, cols[1:])):
        raise InvariantError(f"columns not strictly increasing: {cols}")
    validate_partition(w.partition, host.m)
    if not w.cells <= host.cells:
        raise InvariantError("witness cells are not 1-entries of the host")
    demand = interval_demand(w.mode, w.s, w.B)
    counts = {(c, k): 0 for c in cols for k in range(w.s)}
    for r, c in w.cells:
        if c not in cols:
            raise InvariantError(f"witness cell {(r, c)} outside the witness columns")
        counts[c, w.partition.index_of(r)] += 1
    for (c, k), got in counts.items():
        if got < demand[k]:
            raise InvariantError(f"column {c} has {got} < {demand[k]} witness cells in interval {k + 1}")


# ---------------------------------------------------------------------------
# Permutation families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PermFamily:
    """A deduplicated set of n-permutations, kept in sorted order."""

    n: int
    members: tuple[Permutation, ...]

    def __post_init__(self):
        members = tuple(sorted(set(p if isinstance(p, Permutation) else Permutation(p) for p in self.members)))
        object.__setattr__(self, "members", members)
        validate_family(self)

    @classmethod
    def of(cls, perms: Iterable) -> "PermFamily":
        perms = [p if isinstance(p, Permutation) else Permutation(p) for p in perms]
        if not perms:
            raise InvariantError("cannot infer n from an empty family")
        return cls(perms[0].n, tuple(perms))

    @classmethod
    def all(cls, n: int) -> "PermFamily":
        from itertools import permutations

        return cls(n, tuple(Permutation(p) for p in permutations(range(1, n + 1))))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, p) -> bool:
        return (p if isinstance(p, Permutation) else Permutation(p)) in set(self.members)


def validate_family(f: PermFamily) -> None:
    for p in f.members:
        if p.n != f.n:
            raise InvariantError(f"member {p.image} has size {p.n}, family size is {f.n}")


# ---------------------------------------------------------------------------
# Text formats
# ---------------------------------------------------------------------------


def _as_text(data) -> str:
    if isinstance(data, (bytes, bytearray)):
        try:
            return bytes(data).decode("ascii")
        except UnicodeDecodeError as exc:
            raise FormatError("input is not ASCII") from exc
    return data


def _split_lines(text: str) -> list[str]:
    if not text.endswith("\n"):
        raise FormatError("missing final newline", text.count("\n") + 1)
    return text[:-1].split("\n")


def _parse_header(line: str, lineno: int = 1) -> tuple[int, int]:
    parts = line.split(" ")
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise FormatError(f"malformed header {line!r}, expected two integers", lineno)
    return int(parts[0]), int(parts[1])


def parse_matrix(data) -> Matrix01:
    """Parse ``"m n"`` followed by m lines of n characters from {0, 1}."""
    lines = _split_lines(_as_text(data))
    m, n = _parse_header(lines[0])
    body = lines[1:]
    for k, line in enumerate(body, 2):
        if k - 1 > m:
            raise FormatError(f"unexpected extra line {line!r}", k)
        bad = next((ch for ch in line if ch not in "01"), None)
        if bad is not None:
            raise FormatError(f"illegal character {bad!r}", k)
        if len(line) != n:
            raise FormatError(f"expected {n} characters, got {len(line)}", k)
    if len(body) < m:
        raise FormatError(f"expected {m} rows, got {len(body)}", len(lines) + 1)
    return Matrix01.from_grid(body) if m else Matrix01(0, n)


def serialize_matrix(a: Matrix01) -> str:
    return f"{a.m} {a.n}\n" + "".join(line + "\n" for line in a.to_grid())


def parse_family(data) -> PermFamily:
    """Parse ``"count n"`` followed by one permutation per line."""
    lines = _split_lines(_as_text(data))
    count, n = _parse_header(lines[0])
    body = lines[1:]
    if len(body) != count:
        raise FormatError(f"expected {count} permutations, got {len(body)}", len(lines))
    perms = []
    for k, line in enumerate(body, 2):
        toks = line.split(" ")
        if not all(t.isdigit() for t in toks):
            raise FormatError(f"non-integer token in {line!r}", k)
        if len(toks) != n:
            raise FormatError(f"expected {n} values, got {len(toks)}", k)
        try:
            perms.append(Permutation(tuple(int(t) for t in toks)))
        except InvariantError as exc:
            raise FormatError(str(exc), k) from exc
    return PermFamily(n, tuple(perms))


def serialize_family(f: PermFamily) -> str:
    return f"{len(f)} {f.n}\n" + "".join(str(p) + "\n" for p in f.members)


def parse_sequence(data) -> BlockedSequence:
    """Whitespace separated tokens; a ``|`` token closes a block.

    Integer tokens are read as ints so that sequences produced by ``mst``
    round-trip to equal values.
    """
    text = _as_text(data)
    blocks: list[list] = [[]]
    for tok in text.split():
        if tok == "|":
            blocks.append([])
        else:
            blocks[-1].append(int(tok) if tok.lstrip("-").isdigit() else tok)
    if blocks == [[]]:
        return BlockedSequence(())
    try:
        return BlockedSequence(tuple(tuple(b) for b in blocks))
    except InvariantError as exc:
        raise FormatError(str(exc)) from exc


def serialize_sequence(s: BlockedSequence) -> str:
    return " | ".join(" ".join(map(str, b)) for b in s.blocks) + "\n"

import itertools
import subprocess
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from permvc.core import Matrix01, Permutation, perm_to_matrix

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def matrices(draw, max_m=5, max_n=5, min_m=1, min_n=1):
    m = draw(st.integers(min_m, max_m))
    n = draw(st.integers(min_n, max_n))
    if not m or not n:
        return Matrix01(m, n)
    cells = draw(st.sets(st.tuples(st.integers(1, m), st.integers(1, n))))
    return Matrix01(m, n, frozenset(cells))


@st.composite
def perms(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    return Permutation(tuple(draw(st.permutations(range(1, n + 1)))))


def naive_contains(host: Matrix01, pattern: Matrix01) -> bool:
    """Try every row and column selection; independent of the library search."""
    if pattern.m > host.m or pattern.n > host.n:
        return False
    for rows in itertools.combinations(range(1, host.m + 1), pattern.m):
        for cols in itertools.combinations(range(1, host.n + 1), pattern.n):
            if all((rows[r - 1], cols[c - 1]) in host.cells for r, c in pattern.cells):
                return True
    return False


def naive_k_full(a, k):
    targets = [perm_to_matrix(Permutation(p)) for p in itertools.permutations(range(1, k + 1))]
    for cols in itertools.combinations(range(1, a.n + 1), k):
        sub = a.submatrix(list(range(1, a.m + 1)), cols)
        if all(any(all((rows[r - 1], c) in sub.cells for r, c in t.cells)
                   for rows in itertools.combinations(range(1, a.m + 1), k)) for t in targets):
            return True
    return False


def grid(*lines) -> Matrix01:
    return Matrix01.from_grid(list(lines))


def run_cli(*args, stdin=None):
    """Run the installed entry point in a fresh interpreter."""
    proc = subprocess.run([sys.executable, "-m", "permvc", *map(str, args)], input=stdin,
                          capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


@pytest.fixture
def cli():
    return run_cli

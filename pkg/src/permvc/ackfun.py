"""Inverse Ackermann hierarchy, the R/D recurrences and derived parameters.

Everything is exact: Python ints for the recurrences and ``Fraction`` for
the configurable constant ``c_prime``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
import threading

__all__ = [
    "HierarchyParams",
    "alpha_d",
    "alpha_d_direct",
    "inv_ackermann",
    "recurrence_R",
    "recurrence_D",
    "beta",
    "gamma",
    "mu",
    "derived_params",
]

_lock = threading.Lock()


@dataclass(frozen=True)
class HierarchyParams:
    """Stand-in for the unspecified constant c'_s (same value used for every s)."""

    c_prime: Fraction = Fraction(1)
    notes: str = "c' is not fixed by the source; default 1 is a placeholder"

    def __post_init__(self):
        object.__setattr__(self, "c_prime", Fraction(self.c_prime))
        if self.c_prime <= 0:
            raise ValueError("c_prime must be positive")


def _check_pos(name: str, value: int, least: int) -> None:
    if not isinstance(value, int) or value < least:
        raise ValueError(f"{name} must be an integer >= {least}, got {value!r}")


@lru_cache(maxsize=None)
def _alpha_d(d: int, m: int) -> int:
    if d == 1:
        return (m + 1) // 2
    if m == 1:
        return 0
    return 1 + _alpha_d(d, _alpha_d(d - 1, m))


def alpha_d(d: int, m: int) -> int:
    """d-th function of the inverse Ackermann hierarchy (memoized)."""
    _check_pos("d", d, 1)
    _check_pos("m", m, 1)
    with _lock:
        return _alpha_d(d, m)


def alpha_d_direct(d: int, m: int) -> int:
    """Unmemoized evaluation by iterating the defining recursion."""
    _check_pos("d", d, 1)
    _check_pos("m", m, 1)
    if d == 1:
        return -(-m // 2)
    steps = 0
    while m != 1:
        m = alpha_d_direct(d - 1, m)
        steps += 1
    return steps


def inv_ackermann(m: int) -> int:
    """Least k with alpha_k(m) <= 3."""
    _check_pos("m", m, 1)
    k = 1
    while alpha_d(k, m) > 3:
        k += 1
    return k


@lru_cache(maxsize=None)
def _R(s: int, d: int) -> int:
    if s == 2:
        return 2
    if s == 3:
        return 3
    if s == 4:
        return 2 * d + 1
    if d == 2:
        return 2 ** (s - 2) + 1
    return 2 * (_R(s - 1, d) - 1) + (_R(s - 2, d) - 1) * (_R(s, d - 1) - 3) + 1


def recurrence_R(s: int, d: int) -> int:
    _check_pos("s", s, 2)
    _check_pos("d", d, 2)
    with _lock:
        return _R(s, d)


@lru_cache(maxsize=None)
def _D(s: int, d: int) -> int:
    if s == 1:
        return 0
    if s == 2:
        return 2
    if d == 2:
        return 2 ** (s - 1) + 2 ** (s - 2) - 1
    r = _R(s, d - 1)
    return 2 * _D(s - 1, d) + (_D(s - 2, d) + 1) * (r - 3) + _D(s, d - 1) - r + 1


def recurrence_D(s: int, d: int) -> int:
    _check_pos("s", s, 1)
    _check_pos("d", d, 2)
    with _lock:
        return _D(s, d)


def _as_number(x: Fraction):
    return x.numerator if x.denominator == 1 else x


def beta(s: int, m: int) -> int:
    """D_s evaluated at the inverse Ackermann function of m.

    alpha(m) = 1 for m <= 6 while D is defined from d = 2 on; the argument is
    clamped to 2 there.
    """
    _check_pos("s", s, 1)
    _check_pos("m", m, 1)
    return recurrence_D(s, max(2, inv_ackermann(m)))


def gamma(k: int, n: int, params: HierarchyParams = HierarchyParams()):
    """4 (beta_{k+1}(n) + 2) c' (k+1)!  -- an int when c' makes it integral."""
    _check_pos("k", k, 1)
    _check_pos("n", n, 1)
    return _as_number(4 * (beta(k + 1, n) + 2) * params.c_prime * factorial(k + 1))


def mu(s: int, k: int) -> int:
    """2 ** C(k, (s - 2) / 2) for even s >= 4."""
    if not isinstance(s, int) or s < 4 or s % 2:
        raise ValueError(f"mu needs an even s >= 4, got {s!r}")
    _check_pos("k", k, 0)
    return 2 ** comb(k, (s - 2) // 2)


def derived_params(kind: str, params: HierarchyParams = HierarchyParams(), **args):
    if kind == "beta":
        return beta(args["s"], args["m"])
    if kind == "gamma":
        return gamma(args["k"], args["n"], params)
    if kind == "mu":
        return mu(args["s"], args["k"])
    raise ValueError(f"unknown derived parameter {kind!r}")

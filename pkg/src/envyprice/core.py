"""Exact welfare arithmetic for allocating m indivisible items to n agents.

Utilities are additive and normalized: entry x[i][j] is the value agent j
assigns to item i, every agent's column sums to exactly 1, and all entries are
nonnegative rationals. Everything here is exact; no floats are produced or
accepted anywhere.

The module provides the instance type (:class:`UtilityMatrix`), welfare of an
allocation, the welfare optimum, envy-freeness checks, the optimal envy-free
welfare (via bipartite matching when m = n, via bounded exhaustive search
otherwise), and the per-instance price ratio u*(x) / u*_f(x).

>>> x = UtilityMatrix.from_strings([["1/2", "1/2", "0"],
...                                 ["1/3", "1/3", "1/3"],
...                                 ["1/3", "1/3", "1/3"]])
>>> price_ratio(x).ratio
Fraction(8, 7)
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional, Sequence, Union

__all__ = [
    "Fraction",
    "Allocation",
    "UtilityMatrix",
    "WelfareReport",
    "NegativeUtility",
    "ColumnNotNormalized",
    "DimensionMismatch",
    "SearchSpaceTooLarge",
    "parse_rational",
    "format_rational",
    "allocation_welfare",
    "optimal_welfare",
    "is_envy_free",
    "envy_free_matching",
    "envy_free_optimal_welfare",
    "envy_free_optimal_exhaustive",
    "price_ratio",
    "read_instance",
    "write_instance",
    "instance_from_dict",
    "instance_to_dict",
]

# An allocation maps each item index to the 0-based index of its owner.
Allocation = tuple[int, ...]

EXHAUSTIVE_CAP = 10_000_000

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


class NegativeUtility(ValueError):
    """Some utility entry is negative. Positions are reported 1-based."""

    def __init__(self, item: int, agent: int, value: Fraction):
        self.item = item
        self.agent = agent
        self.value = value
        super().__init__(f"NegativeUtility({item}, {agent})")

    def __str__(self) -> str:
        return f"NegativeUtility({self.item}, {self.agent})"


class ColumnNotNormalized(ValueError):
    """An agent's utilities do not sum to 1. The column is reported 1-based."""

    def __init__(self, column: int, total: Fraction):
        self.column = column
        self.total = total
        super().__init__(f"ColumnNotNormalized({column}, {total})")

    def __str__(self) -> str:
        return f"ColumnNotNormalized({self.column}, {self.total})"


class DimensionMismatch(ValueError):
    def __init__(self, m: int, n: int, need: str):
        self.m = m
        self.n = n
        super().__init__(f"DimensionMismatch: m={m}, n={n}, need {need}")


class SearchSpaceTooLarge(ValueError):
    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"SearchSpaceTooLarge: {size} allocations exceed cap {cap}")


def parse_rational(text: Union[str, int]) -> Fraction:
    """Parse a rational written as "p/q" or "p" (integers only, no decimals)."""
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL_RE.match(text.strip()):
        raise ValueError(f"not a rational in p/q form: {text!r}")
    try:
        return Fraction(text.strip())
    except ZeroDivisionError:
        raise ValueError(f"zero denominator: {text!r}") from None


def format_rational(value: Fraction) -> str:
    """Render exactly, as "p/q", or "p" when the denominator is 1."""
    return str(value)


@dataclass(frozen=True)
class UtilityMatrix:
    """Normalized additive utilities, stored column-major.

    ``columns[j][i]`` is the value of item i to agent j. Besides the Fraction
    view, the constructor builds an exact integer view of the same data: every
    entry multiplied by ``scale``, the lcm of all entry denominators. The hot
    loops (column sums, max scans, exhaustive search) run on those integers.
    """

    columns: tuple[tuple[Fraction, ...], ...]
    scale: int = field(init=False, repr=False, compare=False)
    grid: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        cols = tuple(tuple(Fraction(v) for v in col) for col in self.columns)
        if not cols or not cols[0]:
            raise ValueError("utility matrix needs at least one agent and one item")
        m = len(cols[0])
        if any(len(col) != m for col in cols):
            raise ValueError("all agent columns must have the same length")
        object.__setattr__(self, "columns", cols)
        scale = 1
        for col in cols:
            for v in col:
                scale = scale * v.denominator // math.gcd(scale, v.denominator)
        grid = []
        for j, col in enumerate(cols):
            ints = tuple(v.numerator * (scale // v.denominator) for v in col)
            for i, w in enumerate(ints):
                if w < 0:
                    raise NegativeUtility(i + 1, j + 1, col[i])
            if sum(ints) != scale:
                raise ColumnNotNormalized(j + 1, Fraction(sum(ints), scale))
            grid.append(ints)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "grid", tuple(grid))

    @property
    def n(self) -> int:
        """Number of agents."""
        return len(self.columns)

    @property
    def m(self) -> int:
        """Number of items."""
        return len(self.columns[0])

    def entry(self, item: int, agent: int) -> Fraction:
        return self.columns[agent][item]

    @classmethod
    def from_strings(cls, columns: Sequence[Sequence[Union[str, int]]]) -> "UtilityMatrix":
        return cls(tuple(tuple(parse_rational(v) for v in col) for col in columns))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Fraction]]) -> "UtilityMatrix":
        cols = tuple(tuple(Fraction(rows[i][j]) for i in range(len(rows)))
                     for j in range(len(rows[0])))
        return cls(cols)

    def rows(self) -> list[tuple[Fraction, ...]]:
        return [tuple(self.columns[j][i] for j in range(self.n)) for i in range(self.m)]


def _check_allocation(x: UtilityMatrix, allocation: Sequence[int]) -> None:
    if len(allocation) != x.m:
        raise ValueError(f"allocation covers {len(allocation)} items, matrix has {x.m}")
    for owner in allocation:
        if not 0 <= owner < x.n:
            raise ValueError(f"allocation owner {owner} out of range 0..{x.n - 1}")


def allocation_welfare(x: UtilityMatrix, allocation: Sequence[int]) -> Fraction:
    """Utilitarian welfare: each item counted at its owner's value for it."""
    _check_allocation(x, allocation)
    total = sum(x.grid[owner][i] for i, owner in enumerate(allocation))
    return Fraction(total, x.scale)


def optimal_welfare(x: UtilityMatrix) -> tuple[Fraction, Allocation]:
    """Welfare optimum over all allocations, with one witnessing allocation.

    Each item independently goes to an agent valuing it most; ties break
    toward the lowest agent index, so the witness is unique and deterministic.
    """
    grid = x.grid
    total = 0
    owners = []
    for i in range(x.m):
        best_j = 0
        best_v = grid[0][i]
        for j in range(1, x.n):
            v = grid[j][i]
            if v > best_v:
                best_v = v
                best_j = j
        total += best_v
        owners.append(best_j)
    return Fraction(total, x.scale), tuple(owners)


def is_envy_free(x: UtilityMatrix, allocation: Sequence[int]) -> bool:
    """True iff no agent values another agent's bundle above its own."""
    _check_allocation(x, allocation)
    n, grid = x.n, x.grid
    bundles = [[0] * n for _ in range(n)]  # bundles[j][g] = value of g's bundle to j
    for i, owner in enumerate(allocation):
        for j in range(n):
            bundles[j][owner] += grid[j][i]
    for j in range(n):
        own = bundles[j][j]
        if any(bundles[j][g] > own for g in range(n)):
            return False
    return True


def _compat_adjacency(x: UtilityMatrix) -> list[list[int]]:
    """Per agent, the items attaining that agent's column maximum."""
    adj = []
    for col in x.grid:
        best = max(col)
        adj.append([i for i, v in enumerate(col) if v == best])
    return adj


def _hopcroft_karp(adj: list[list[int]], n_right: int) -> list[int]:
    """Maximum bipartite matching; returns right-mate per left vertex (-1 if none).

    Deterministic: vertices and adjacency are scanned in index order and no
    sets are used, so identical inputs give identical matchings.
    """
    n_left = len(adj)
    INF = n_left + n_right + 1
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0] * n_left

    def bfs() -> bool:
        queue = []
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_r[v]
            if w == -1 or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = INF
        return False

    while bfs():
        for u in range(n_left):
            if match_l[u] == -1:
                dfs(u)
    return match_l


def envy_free_matching(x: UtilityMatrix) -> Optional[Allocation]:
    """One-item-per-agent envy-free allocation for square instances.

    With m = n an allocation is envy-free exactly when it is a bijection that
    hands every agent an item attaining its column maximum (each agent must
    get value at least 1/n, forcing one item each; a single item beats every
    other bundle only if it beats every other single item). So the search is
    a perfect matching in the compatibility graph agent j ~ item i iff
    x[i][j] = max_i' x[i'][j]. Returns None when no perfect matching exists.
    """
    if x.m != x.n:
        raise DimensionMismatch(x.m, x.n, "a square instance (m = n)")
    match_l = _hopcroft_karp(_compat_adjacency(x), x.m)
    if any(v == -1 for v in match_l):
        return None
    owners = [-1] * x.m
    for agent, item in enumerate(match_l):
        owners[item] = agent
    return tuple(owners)


def envy_free_optimal_welfare(x: UtilityMatrix) -> Optional[Fraction]:
    """Best envy-free welfare of a square instance, or None if none exists.

    All envy-free allocations of a square instance have the same welfare,
    the sum of the column maxima, because every agent receives an item it
    values at exactly its column maximum.
    """
    if envy_free_matching(x) is None:
        return None
    total = sum(max(col) for col in x.grid)
    return Fraction(total, x.scale)


def envy_free_optimal_exhaustive(
    x: UtilityMatrix, cap: int = EXHAUSTIVE_CAP
) -> Optional[tuple[Fraction, Allocation]]:
    """Best envy-free allocation by full enumeration of all n^m allocations.

    Independent of the matching path; usable for any m. Ties break toward
    the lexicographically smallest owner vector. Raises SearchSpaceTooLarge
    when n^m exceeds the cap.
    """
    n, m, grid = x.n, x.m, x.grid
    size = n**m
    if size > cap:
        raise SearchSpaceTooLarge(size, cap)
    best_welfare = -1
    best_alloc: Optional[Allocation] = None
    for owners in product(range(n), repeat=m):
        bundles = [[0] * n for _ in range(n)]
        for i, g in enumerate(owners):
            for j in range(n):
                bundles[j][g] += grid[j][i]
        envy = False
        for j in range(n):
            own = bundles[j][j]
            if any(bundles[j][g] > own for g in range(n)):
                envy = True
                break
        if envy:
            continue
        welfare = sum(bundles[j][j] for j in range(n))
        if welfare > best_welfare:
            best_welfare = welfare
            best_alloc = owners
    if best_alloc is None:
        return None
    return Fraction(best_welfare, x.scale), best_alloc


@dataclass(frozen=True)
class WelfareReport:
    """Welfare optimum, envy-free optimum (if any), and their ratio."""

    optimal: Fraction
    envy_free_optimal: Optional[Fraction]
    ratio: Optional[Fraction]

    def __post_init__(self) -> None:
        if self.envy_free_optimal is not None:
            if not (self.optimal >= self.envy_free_optimal >= 1):
                raise ValueError(
                    f"inconsistent report: optimal={self.optimal}, "
                    f"envy-free optimal={self.envy_free_optimal}"
                )
            if self.ratio != self.optimal / self.envy_free_optimal:
                raise ValueError("ratio does not match the reported welfares")


def price_ratio(x: UtilityMatrix, cap: int = EXHAUSTIVE_CAP) -> WelfareReport:
    """Per-instance price of envy-freeness u*(x) / u*_f(x).

    Square instances go through the matching characterization; all others go
    through bounded exhaustive search. The ratio is absent exactly when the
    instance admits no envy-free allocation.

    >>> u = UtilityMatrix.from_strings([["1/2", "1/2"], ["1/2", "1/2"]])
    >>> price_ratio(u)
    WelfareReport(optimal=Fraction(1, 1), envy_free_optimal=Fraction(1, 1), ratio=Fraction(1, 1))
    """
    opt, _ = optimal_welfare(x)
    if x.m == x.n:
        fair = envy_free_optimal_welfare(x)
    else:
        found = envy_free_optimal_exhaustive(x, cap)
        fair = None if found is None else found[0]
    if fair is None:
        return WelfareReport(opt, None, None)
    return WelfareReport(opt, fair, opt / fair)


# ---------------------------------------------------------------------------
# Instance files: {"n": int, "m": int, "columns": [[entries of column j]]}
# with columns[j][i] = value of item i+1 to agent j+1, entries "p/q" or "p".
# ---------------------------------------------------------------------------

def instance_from_dict(payload: dict) -> UtilityMatrix:
    for key in ("n", "m", "columns"):
        if key not in payload:
            raise ValueError(f"instance file: missing key {key!r}")
    n, m, columns = payload["n"], payload["m"], payload["columns"]
    if not isinstance(n, int) or not isinstance(m, int) or n < 1 or m < 1:
        raise ValueError("instance file: n and m must be positive integers")
    if not isinstance(columns, list) or len(columns) != n:
        raise ValueError(f"instance file: expected {n} columns, got {len(columns)}")
    parsed = []
    for j, col in enumerate(columns):
        if not isinstance(col, list) or len(col) != m:
            raise ValueError(f"instance file: column {j + 1} must list {m} entries")
        entries = []
        for i, v in enumerate(col):
            if isinstance(v, float):
                raise ValueError(
                    f"instance file: entry ({i + 1}, {j + 1}) is a float; use \"p/q\""
                )
            entries.append(parse_rational(v))
        parsed.append(tuple(entries))
    return UtilityMatrix(tuple(parsed))


def instance_to_dict(x: UtilityMatrix) -> dict:
    return {
        "n": x.n,
        "m": x.m,
        "columns": [[format_rational(v) for v in col] for col in x.columns],
    }


def read_instance(path: str) -> UtilityMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"instance file: invalid JSON ({exc})") from exc
    return instance_from_dict(payload)


def write_instance(x: UtilityMatrix, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(x), fh, indent=2)
        fh.write("\n")

"""Exact worst-case ratio p(n) for n agents and n items.

The search space is the compact program over support-size histograms: s_i
counts columns that are uniform on i items, r_i counts optimally-assigned
items inside those columns, and

    p(n) = max (sum r_i/i) / (sum s_i/i)
    subject to sum s_i = n, sum r_i = n, 0 <= r_i <= i*s_i.

For a fixed s the best r is forced: fill the budget of n items into the
smallest supported indices first (a unit at index i is worth 1/i). That
collapses the search to s alone. Two outer searches are provided: the
restricted family whose sub-n support is two consecutive sizes {k-1, k}
(plus full-support columns), which contains an optimum, and a guarded full
enumeration of all compositions used to cross-check it for small n.

The ratio itself is found either by exact Dinkelbach iteration (default) or
by certified bisection; both finish with a zero-objective solve at p, so
they return the identical lexicographically least witness.

All arithmetic is exact. Internally a candidate is scored with integers:
with M = lcm(1..n) and alpha = p/q, the objective sign of a candidate is the
sign of q*(M*sum r_i/i) - p*(M*sum s_i/i), both factors integers.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Optional, Sequence

from .core import format_rational, parse_rational
from .structure import InvalidWitness, _check_witness_vectors

__all__ = [
    "Mode",
    "Search",
    "SolveOptions",
    "StructuredWitness",
    "GuardViolation",
    "KNOWN_RATIOS",
    "FULL_ENUMERATION_LIMIT",
    "lemma4_candidates",
    "solve_alpha",
    "solve_p_nn",
    "sparse_witness_exists",
    "witness_support",
    "witness_table_rows",
    "witness_to_dict",
    "witness_from_dict",
    "read_witness",
    "write_witness",
]

FULL_ENUMERATION_LIMIT = 12

# Reference values for small n, used by the verify command and regression
# tests: p(1)..p(9).
KNOWN_RATIOS = {
    1: Fraction(1),
    2: Fraction(1),
    3: Fraction(8, 7),
    4: Fraction(4, 3),
    5: Fraction(60, 43),
    6: Fraction(3, 2),
    7: Fraction(63, 40),
    8: Fraction(72, 43),
    9: Fraction(9, 5),
}


class Mode(Enum):
    BISECTION = "bisect"
    EXACT_FRACTIONAL = "exact"


class Search(Enum):
    LEMMA4_RESTRICTED = "lemma4"
    FULL_ENUMERATION = "full"


class GuardViolation(ValueError):
    def __init__(self, n: int, limit: int = FULL_ENUMERATION_LIMIT):
        self.n = n
        self.limit = limit
        super().__init__(
            f"full enumeration is guarded to n <= {limit}, got n = {n}"
        )


@dataclass(frozen=True)
class SolveOptions:
    mode: Mode = Mode.EXACT_FRACTIONAL
    search: Search = Search.LEMMA4_RESTRICTED
    workers: int = 1

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass(frozen=True)
class StructuredWitness:
    """Feasible (s, r) pair of the compact program with its exact ratio."""

    s: tuple[int, ...]
    r: tuple[int, ...]
    ratio: Fraction

    def __post_init__(self) -> None:
        n = len(self.s)
        _check_witness_vectors(self.s, self.r, n)
        num = sum(Fraction(ri, i + 1) for i, ri in enumerate(self.r))
        den = sum(Fraction(si, i + 1) for i, si in enumerate(self.s))
        if self.ratio != num / den:
            raise InvalidWitness(
                f"ratio {self.ratio} does not equal (sum r_i/i)/(sum s_i/i) = {num / den}"
            )


def _restricted_sparse(
    n: int, ks: Optional[Sequence[int]] = None
) -> Iterator[tuple[tuple[int, int], ...]]:
    """Sparse candidates ((index, count), ...) of the restricted family.

    Sub-n support sits in a consecutive pair {k-1, k}; the rest of the n
    columns have full support. Blocks below full support are capped at 2n
    items: past that, dropping a block keeps the filled numerator and
    shrinks the denominator, so no optimum is lost. Histograms whose sub-n
    support fits several k are emitted for the largest such k only, so the
    stream is duplicate-free and splitting the k range partitions it.
    """
    if n == 1:
        yield ((1, 1),)
        return
    if n == 2:
        if ks is not None and 2 not in ks:
            return
        for ones in range(n + 1):
            pairs = []
            if ones:
                pairs.append((1, ones))
            if n - ones:
                pairs.append((2, n - ones))
            yield tuple(pairs)
        return
    cap = 2 * n
    for k in ks if ks is not None else range(2, n):
        for b in range(0, min(n, cap // (k - 1)) + 1):
            rest = cap - (k - 1) * b
            a_lo = 0 if k == 2 else 1
            for a in range(a_lo, min(n - b, rest // k) + 1):
                c = n - a - b
                pairs = []
                if b:
                    pairs.append((k - 1, b))
                if a:
                    pairs.append((k, a))
                if c:
                    pairs.append((n, c))
                yield tuple(pairs)


def lemma4_candidates(n: int) -> Iterator[tuple[int, ...]]:
    """The restricted s-vectors as full tuples, each summing to n."""
    if n < 2:
        raise ValueError("the restricted family needs n >= 2")
    for pairs in _restricted_sparse(n):
        s = [0] * n
        for i, c in pairs:
            s[i - 1] = c
        yield tuple(s)


def _greedy_fill(s: Sequence[int], n: int) -> tuple[int, ...]:
    """Optimal r for fixed s: budget n poured into the smallest indices."""
    r = [0] * len(s)
    budget = n
    for idx, si in enumerate(s):
        if budget == 0:
            break
        if si:
            take = min(budget, (idx + 1) * si)
            r[idx] = take
            budget -= take
    return tuple(r)


def _pairs_to_s(pairs: Sequence[tuple[int, int]], n: int) -> tuple[int, ...]:
    s = [0] * n
    for i, c in pairs:
        s[i - 1] = c
    return tuple(s)


def _scan_restricted(args) -> Optional[tuple[int, tuple[int, ...]]]:
    """Best (key, s) over the restricted candidates with the given k values."""
    n, p, q, ks = args
    wgt = [0] * (n + 1)
    m = math.lcm(*range(1, n + 1))
    for i in range(1, n + 1):
        wgt[i] = m // i
    best_key = None
    best_s: Optional[tuple[int, ...]] = None
    for pairs in _restricted_sparse(n, ks):
        g = 0
        f = 0
        budget = n
        for i, c in pairs:
            g += c * wgt[i]
            if budget:
                take = i * c
                if take > budget:
                    take = budget
                f += take * wgt[i]
                budget -= take
        key = q * f - p * g
        if best_key is None or key > best_key:
            best_key = key
            best_s = _pairs_to_s(pairs, n)
        elif key == best_key:
            s = _pairs_to_s(pairs, n)
            if s < best_s:
                best_s = s
    if best_key is None:
        return None
    return best_key, best_s


def _scan_full(args) -> Optional[tuple[int, tuple[int, ...]]]:
    """Best (key, s) over all compositions with s_1 in the given values."""
    n, p, q, first_values = args
    m = math.lcm(*range(1, n + 1))
    wgt = [0] * (n + 1)
    for i in range(1, n + 1):
        wgt[i] = m // i
    best_key = None
    best_s: Optional[tuple[int, ...]] = None
    for v in first_values:
        rest = n - v
        slots = rest + n - 2  # compositions of rest into n-1 parts
        base_g = v * wgt[1]
        base_f = min(n, v) * wgt[1]
        base_budget = n - min(n, v)
        for bars in combinations(range(slots), n - 2):
            g = base_g
            f = base_f
            budget = base_budget
            prev = -1
            idx = 2
            for bar in bars:
                c = bar - prev - 1
                if c:
                    g += c * wgt[idx]
                    if budget:
                        take = idx * c
                        if take > budget:
                            take = budget
                        f += take * wgt[idx]
                        budget -= take
                prev = bar
                idx += 1
            c = slots - prev - 1
            if c:
                g += c * wgt[n]
                if budget:
                    take = budget  # n*c never binds: c*n >= budget
                    f += take * wgt[n]
                    budget = 0
            key = q * f - p * g
            if best_key is None or key > best_key:
                best_key = key
                best_s = _decode_bars(v, bars, slots, n)
            elif key == best_key:
                s = _decode_bars(v, bars, slots, n)
                if s < best_s:
                    best_s = s
    if best_key is None:
        return None
    return best_key, best_s


def _decode_bars(v: int, bars, slots: int, n: int) -> tuple[int, ...]:
    s = [v]
    prev = -1
    for bar in bars:
        s.append(bar - prev - 1)
        prev = bar
    s.append(slots - prev - 1)
    return tuple(s)


def _witness_ratio(s: Sequence[int], r: Sequence[int]) -> Fraction:
    num = sum(Fraction(ri, i + 1) for i, ri in enumerate(r))
    den = sum(Fraction(si, i + 1) for i, si in enumerate(s))
    return num / den


def _chunks(values: list, parts: int) -> list[list]:
    parts = min(parts, len(values)) or 1
    size = -(-len(values) // parts)
    return [values[i : i + size] for i in range(0, len(values), size)]


def solve_alpha(
    n: int, alpha: Fraction, options: Optional[SolveOptions] = None
) -> tuple[Fraction, StructuredWitness]:
    """Exact maximum of sum r_i/i - alpha * sum s_i/i with its witness.

    The witness is the maximizing (s, r) pair, ties broken toward the
    lexicographically smallest s; its ratio field is the witness's own
    ratio, not alpha. A nonnegative maximum certifies p(n) >= alpha.
    """
    if n < 1:
        raise ValueError("n must be positive")
    alpha = Fraction(alpha)
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    opts = options or SolveOptions()

    if n == 1:
        s = (1,)
        witness = StructuredWitness(s, (1,), Fraction(1))
        return Fraction(1) - alpha, witness

    p, q = alpha.numerator, alpha.denominator
    if opts.search is Search.FULL_ENUMERATION:
        if n > FULL_ENUMERATION_LIMIT:
            raise GuardViolation(n)
        scan, units = _scan_full, list(range(n + 1))
    else:
        scan, units = _scan_restricted, list(range(2, max(2, n - 1) + 1))

    if opts.workers == 1 or len(units) == 1:
        results = [scan((n, p, q, units))]
    else:
        tasks = [(n, p, q, chunk) for chunk in _chunks(units, opts.workers)]
        with ProcessPoolExecutor(max_workers=opts.workers) as pool:
            results = list(pool.map(scan, tasks))

    best_key = None
    best_s = None
    for res in results:
        if res is None:
            continue
        key, s = res
        if best_key is None or key > best_key or (key == best_key and s < best_s):
            best_key, best_s = key, s

    r = _greedy_fill(best_s, n)
    witness = StructuredWitness(best_s, r, _witness_ratio(best_s, r))
    m = math.lcm(*range(1, n + 1))
    return Fraction(best_key, q * m), witness


def solve_p_nn(n: int, options: Optional[SolveOptions] = None) -> StructuredWitness:
    """Exact p(n) with a maximizing witness.

    Default mode is exact Dinkelbach iteration: start at alpha = 1 and jump
    to the ratio of the best witness until the objective hits zero; each jump
    strictly increases alpha within the finite set of attainable ratios, so
    termination is guaranteed. Bisection mode narrows [1, n] instead, but
    also certifies its answer with a final zero-objective solve, so the two
    modes return the same witness.
    """
    if n < 1:
        raise ValueError("n must be positive")
    opts = options or SolveOptions()
    if opts.mode is Mode.BISECTION:
        return _solve_bisection(n, opts)
    return _solve_dinkelbach(n, opts)


def _solve_dinkelbach(n: int, opts: SolveOptions) -> StructuredWitness:
    alpha = Fraction(1)
    for _ in range(100000):
        objective, witness = solve_alpha(n, alpha, opts)
        if objective == 0:
            return witness
        if objective < 0:
            raise AssertionError("objective below zero at an attainable ratio")
        alpha = witness.ratio
    raise AssertionError("fractional iteration failed to terminate")


def _solve_bisection(n: int, opts: SolveOptions) -> StructuredWitness:
    lo, hi = Fraction(1), Fraction(n)
    for _ in range(100000):
        objective, witness = solve_alpha(n, lo, opts)
        if objective == 0:
            return witness
        lo = witness.ratio  # objective > 0: a better attainable ratio exists
        if hi <= lo:
            continue
        mid = (lo + hi) / 2
        objective, witness = solve_alpha(n, mid, opts)
        if objective == 0:
            return witness
        if objective > 0:
            lo = witness.ratio
        else:
            hi = mid
    raise AssertionError("bisection failed to terminate")


def sparse_witness_exists(n: int, p: Fraction) -> bool:
    """True iff the restricted family attains p, i.e. some optimal witness
    has at most three nonzero s-entries (the family's supports are that
    sparse by construction)."""
    objective, witness = solve_alpha(n, p, SolveOptions())
    if objective != 0:
        return False
    return sum(1 for v in witness.s if v) <= 3


def witness_support(vec: Sequence[int]) -> str:
    """Compact rendering of a count vector, e.g. (0,1,1,0,3) -> "2:1,3:1,5:3"."""
    return ",".join(f"{i + 1}:{v}" for i, v in enumerate(vec) if v)


def witness_table_rows(
    lo: int, hi: int, options: Optional[SolveOptions] = None
) -> list[tuple[int, int, int, str, str]]:
    """CSV rows (n, p_num, p_den, s_support, r_support) for n in lo..hi."""
    rows = []
    for n in range(lo, hi + 1):
        w = solve_p_nn(n, options)
        rows.append(
            (
                n,
                w.ratio.numerator,
                w.ratio.denominator,
                witness_support(w.s),
                witness_support(w.r),
            )
        )
    return rows


def witness_to_dict(w: StructuredWitness) -> dict:
    return {
        "n": len(w.s),
        "s": list(w.s),
        "r": list(w.r),
        "ratio": format_rational(w.ratio),
    }


def witness_from_dict(payload: dict) -> StructuredWitness:
    for key in ("n", "s", "r", "ratio"):
        if key not in payload:
            raise InvalidWitness(f"witness file: missing key {key!r}")
    n = payload["n"]
    s, r = payload["s"], payload["r"]
    if not isinstance(n, int) or not isinstance(s, list) or not isinstance(r, list):
        raise InvalidWitness("witness file: n must be an int, s and r lists")
    if len(s) != n or len(r) != n:
        raise InvalidWitness(f"witness file: s and r must have {n} entries")
    return StructuredWitness(tuple(s), tuple(r), parse_rational(payload["ratio"]))


def read_witness(path: str) -> StructuredWitness:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidWitness(f"witness file: invalid JSON ({exc})") from exc
    return witness_from_dict(payload)


def write_witness(w: StructuredWitness, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(witness_to_dict(w), fh, indent=2)
        fh.write("\n")

"""Deterministic prime generation and prime-counting primitives.

The workhorse is a segmented sieve of Eratosthenes over odd-only numpy
bitsets; segments are sized from the configuration and may be sieved by
independent workers, with an ordered merge so output is identical to a
single-worker run.  On top of it sit nth-prime lookup, cumulative counting
tables, and the explicit prime-bound scanners used by the gap machinery.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .errors import BudgetExceeded, InvalidRange, RangeTooLarge


@dataclass(frozen=True)
class PrimeRange:
    """Exactly the primes in [lo, hi), ascending, as an int64 array."""
    lo: int
    hi: int
    primes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.primes.setflags(write=False)

    def __len__(self) -> int:
        return int(self.primes.size)


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit by a plain bool sieve (used for base primes)."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p:: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _sieve_odd_segment(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Primes in [lo, hi) for odd lo, using the supplied odd base primes."""
    count = (hi - lo + 1) // 2
    mask = np.ones(count, dtype=bool)
    for p in base:
        p = int(p)
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start >= hi:
            if p * p >= hi:
                break
            continue
        if start % 2 == 0:
            start += p
        if start >= hi:
            continue
        mask[(start - lo) // 2:: p] = False
    return lo + 2 * np.flatnonzero(mask).astype(np.int64)


def sieve_range(lo: int, hi: int,
                config: RunConfig = DEFAULT_CONFIG) -> PrimeRange:
    """Exactly the primes in [lo, hi); repeated calls are bit-identical."""
    if not (2 <= lo < hi):
        raise InvalidRange(f"need 2 <= lo < hi, got [{lo}, {hi})")
    if hi > (1 << 63) - 1:
        raise InvalidRange("hi exceeds 2^63-1")
    if hi - lo > config.max_sieve_span:
        raise RangeTooLarge(
            f"span {hi - lo} exceeds budget {config.max_sieve_span}")

    base = simple_sieve(math.isqrt(hi - 1))
    odd_base = base[base > 2]

    pieces: list[np.ndarray] = []
    if lo <= 2 < hi:
        pieces.append(np.array([2], dtype=np.int64))
    start = max(lo, 3)
    if start % 2 == 0:
        start += 1
    if start >= hi:
        return PrimeRange(lo, hi, np.concatenate(pieces)
                          if pieces else np.array([], dtype=np.int64))

    span = 2 * config.sieve_segment_odds
    bounds = []
    seg_lo = start
    while seg_lo < hi:
        bounds.append((seg_lo, min(seg_lo + span, hi)))
        seg_lo += span

    if config.workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            segs = list(pool.map(
                lambda b: _sieve_odd_segment(b[0], b[1], odd_base), bounds))
    else:
        segs = [_sieve_odd_segment(a, b, odd_base) for a, b in bounds]
    pieces.extend(segs)
    return PrimeRange(lo, hi, np.concatenate(pieces))


def primes_upto(x: int, config: RunConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Primes p <= x."""
    if x < 2:
        return np.array([], dtype=np.int64)
    return sieve_range(2, x + 1, config).primes


def iter_prime_blocks(start: int, config: RunConfig = DEFAULT_CONFIG):
    """Yield PrimeRange blocks [start, inf) in ascending order, forever.

    Callers break out once they have counted enough; block width follows the
    configured segment size.
    """
    span = 2 * config.sieve_segment_odds
    lo = max(2, start)
    while True:
        hi = lo + span
        yield sieve_range(lo, hi, config)
        lo = hi


def nth_prime(n: int, config: RunConfig = DEFAULT_CONFIG) -> int:
    """The n-th prime, p_1 = 2."""
    if n < 1:
        raise InvalidRange("n must be >= 1")
    if n > config.max_nth_index:
        raise BudgetExceeded(
            f"n = {n} exceeds nth-prime budget {config.max_nth_index}")
    return nth_primes_batch([n], config)[0]


def nth_primes_batch(indices: list[int],
                     config: RunConfig = DEFAULT_CONFIG) -> list[int]:
    """p_n for each n in `indices` with a single streaming pass."""
    if not indices:
        return []
    n_max = max(indices)
    if min(indices) < 1:
        raise InvalidRange("indices must be >= 1")
    if n_max > config.max_nth_index:
        raise BudgetExceeded(
            f"n = {n_max} exceeds nth-prime budget {config.max_nth_index}")
    collected: list[np.ndarray] = []
    total = 0
    for block in iter_prime_blocks(2, config):
        collected.append(block.primes)
        total += len(block)
        if total >= n_max:
            break
    allp = np.concatenate(collected)
    return [int(allp[i - 1]) for i in indices]


def prime_count_table(x: int, config: RunConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Array t with t[n] = pi(n) for 0 <= n <= x (int64)."""
    if x > config.max_sieve_span:
        raise RangeTooLarge(f"{x} exceeds budget {config.max_sieve_span}")
    flags = np.zeros(x + 1, dtype=np.int64)
    if x >= 2:
        flags[primes_upto(x, config)] = 1
    return np.cumsum(flags)


def is_prime_deterministic(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3 * 10^24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# -- explicit bound scanners --------------------------------------------------

@dataclass(frozen=True)
class BoundCheckRow:
    check: str
    n: int
    lhs: float
    value: float
    rhs: float
    passed: bool


@dataclass(frozen=True)
class BoundReport:
    checked: int
    violations: tuple[BoundCheckRow, ...]
    samples: tuple[BoundCheckRow, ...]  # first few rows for display


def check_pn_bounds(n_lo: int, n_hi: int,
                    config: RunConfig = DEFAULT_CONFIG) -> BoundReport:
    """Scan the n log n sandwiches for p_n and (where n >= 355991) for pi(n).

    For 6 <= n: n log n + n log log n - n < p_n < n log n + n log log n.
    For n >= 355991: n/log n (1 + 1/log n) <= pi(n)
                     <= n/log n (1 + 1/log n + 2.51/log^2 n).
    Returns the expected-empty list of violations.
    """
    if n_lo < 6:
        raise InvalidRange("p_n sandwich starts at n = 6")
    if n_hi < n_lo:
        raise InvalidRange("empty range")
    pns = np.array(nth_primes_batch(list(range(n_lo, n_hi + 1)), config),
                   dtype=np.float64)
    ns = np.arange(n_lo, n_hi + 1, dtype=np.float64)
    ln = np.log(ns)
    lln = np.log(ln)
    lhs = ns * ln + ns * lln - ns
    rhs = ns * ln + ns * lln
    ok = (lhs < pns) & (pns < rhs)
    rows = [BoundCheckRow("pn_sandwich", int(ns[i]), float(lhs[i]),
                          float(pns[i]), float(rhs[i]), bool(ok[i]))
            for i in np.flatnonzero(~ok)]
    samples = [BoundCheckRow("pn_sandwich", int(ns[i]), float(lhs[i]),
                             float(pns[i]), float(rhs[i]), bool(ok[i]))
               for i in range(min(3, len(ns)))]
    checked = len(ns)

    pi_lo = max(n_lo, 355991)
    if n_hi >= pi_lo:
        table = prime_count_table(n_hi, config)
        ns2 = np.arange(pi_lo, n_hi + 1, dtype=np.float64)
        pis = table[pi_lo: n_hi + 1].astype(np.float64)
        ln2 = np.log(ns2)
        low = ns2 / ln2 * (1 + 1 / ln2)
        high = ns2 / ln2 * (1 + 1 / ln2 + 2.51 / (ln2 * ln2))
        ok2 = (low <= pis) & (pis <= high)
        rows += [BoundCheckRow("pi_sandwich", int(ns2[i]), float(low[i]),
                               float(pis[i]), float(high[i]), bool(ok2[i]))
                 for i in np.flatnonzero(~ok2)]
        samples += [BoundCheckRow("pi_sandwich", int(ns2[i]), float(low[i]),
                                  float(pis[i]), float(high[i]), bool(ok2[i]))
                    for i in range(min(3, len(ns2)))]
        checked += len(ns2)

    return BoundReport(checked, tuple(rows), tuple(samples))


def check_shifted_prime_gap(k_lo: int, k_hi: int,
                            config: RunConfig = DEFAULT_CONFIG) -> BoundReport:
    """Scan p_{pi(k)+k} - p_{pi(k)+1} <= 1.6 k log k for k in [k_lo, k_hi]."""
    if k_lo < 213:
        raise InvalidRange("the gap bound starts at k = 213")
    if k_hi < k_lo:
        raise InvalidRange("empty range")
    table = prime_count_table(k_hi, config)
    top_index = int(table[k_hi]) + k_hi
    # collect p_1..p_top once
    collected: list[np.ndarray] = []
    total = 0
    for block in iter_prime_blocks(2, config):
        collected.append(block.primes)
        total += len(block)
        if total >= top_index:
            break
    allp = np.concatenate(collected)

    ks = np.arange(k_lo, k_hi + 1, dtype=np.int64)
    piks = table[k_lo: k_hi + 1]
    left = allp[piks + ks - 1] - allp[piks]           # p_{pi(k)+k} - p_{pi(k)+1}
    right = 1.6 * ks.astype(np.float64) * np.log(ks.astype(np.float64))
    ok = left.astype(np.float64) <= right
    rows = [BoundCheckRow("gap_1p6klogk", int(ks[i]), float(left[i]),
                          float(left[i]), float(right[i]), bool(ok[i]))
            for i in np.flatnonzero(~ok)]
    samples = [BoundCheckRow("gap_1p6klogk", int(ks[i]), float(left[i]),
                             float(left[i]), float(right[i]), bool(ok[i]))
               for i in range(min(3, len(ks)))]
    return BoundReport(len(ks), tuple(rows), tuple(samples))

"""Chebotarev-restricted exponential sums and the explicit error-budget
formulas.

The central object is sum(log p * e(theta p)) over primes p <= X in a fixed
conjugacy class, optionally restricted to a residue class or twisted by a
Dirichlet character.  Phases come from certified fractional parts: theta is
held as a scaled integer with a proven error bound, so each term's phase is
accurate to far better than 2^-40 with no incremental drift.  Partial sums
are accumulated in fixed shard order with compensated (Kahan) addition, so
results do not depend on the worker count.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .errors import BudgetExceeded, ValidationError
from .galois import DirichletCharacter, GaloisContext, classify_primes
from .irrationals import IrrationalNumber
from .primes import primes_upto


@dataclass(frozen=True)
class Frequency:
    """theta, either an exact rational or k times a certified irrational."""
    rational: Optional[Fraction] = None
    base: Optional[IrrationalNumber] = None
    k: int = 1

    def __post_init__(self) -> None:
        if (self.rational is None) == (self.base is None):
            raise ValidationError("frequency is rational XOR irrational")

    @staticmethod
    def from_rational(r) -> "Frequency":
        return Frequency(rational=Fraction(r))

    @staticmethod
    def from_irrational(x: IrrationalNumber, k: int = 1) -> "Frequency":
        return Frequency(base=x, k=k)

    def describe(self) -> str:
        if self.rational is not None:
            return f"rational:{self.rational}"
        return f"irrational*k:{self.k}"


def fractional_parts(freq: Frequency, ns: np.ndarray,
                     config: RunConfig = DEFAULT_CONFIG) -> np.ndarray:
    """{theta * n} for integer n, certified phase error well below 2^-40."""
    if freq.rational is not None:
        r, s = freq.rational.numerator, freq.rational.denominator
        if abs(r) < (1 << 30) and int(ns.max(initial=0)) < (1 << 32):
            return ((ns.astype(np.int64) * r) % s) / float(s)
        return np.fromiter(((int(n) * r % s) / s for n in ns),
                           dtype=np.float64, count=ns.size)
    bits = config.phase_bits
    scaled, err = freq.base.scaled_int(bits, config)
    scaled *= freq.k
    mask = (1 << bits) - 1
    scale = float(1 << bits)
    return np.fromiter((((scaled * int(n)) & mask) / scale for n in ns),
                       dtype=np.float64, count=ns.size)


def _kahan_complex_sum(parts: list[complex]) -> complex:
    total = 0j
    comp = 0j
    for v in parts:
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def _sharded_dot(logs: np.ndarray, phases: np.ndarray,
                 weights: Optional[np.ndarray] = None,
                 shard: int = 1 << 16) -> complex:
    """sum(logs * e(phases) * weights) with fixed sharding and Kahan merge."""
    vals = logs * np.exp(2j * math.pi * phases)
    if weights is not None:
        vals = vals * weights
    parts = [complex(np.sum(vals[i: i + shard]))
             for i in range(0, vals.size, shard)]
    return _kahan_complex_sum(parts)


@dataclass(frozen=True)
class ExpSumResult:
    x: int
    q: int
    a: Optional[int]
    chi_id: Optional[str]
    theta: str
    value: complex
    trivial_bound: float
    terms: int


class ClassPrimeCache:
    """Classified primes up to X for one context, reused across sums."""

    def __init__(self, ctx: GaloisContext, x: int,
                 config: RunConfig = DEFAULT_CONFIG) -> None:
        if x > config.max_expsum_x:
            raise BudgetExceeded(f"X = {x} exceeds budget {config.max_expsum_x}")
        self.ctx = ctx
        self.x = x
        self.primes = primes_upto(x, config)
        self.class_idx = classify_primes(self.primes, ctx, config)
        self.logs = np.log(self.primes.astype(np.float64))

    def class_mask(self, label: str) -> np.ndarray:
        i = self.ctx.class_labels().index(label)
        return self.class_idx == i


def g_sum(x: int, ctx: GaloisContext, class_label: str, q: int, a: int,
          theta: Frequency, config: RunConfig = DEFAULT_CONFIG,
          cache: Optional[ClassPrimeCache] = None) -> ExpSumResult:
    """sum over p <= X, p = a mod q, p in the class, of log(p) e(theta p)."""
    if q < 1 or math.gcd(a, q) != 1:
        raise ValidationError("need q >= 1 and gcd(a, q) = 1")
    cache = cache or ClassPrimeCache(ctx, x, config)
    mask = cache.class_mask(class_label)
    if q > 1:
        mask = mask & (cache.primes % q == a % q)
    primes = cache.primes[mask]
    logs = cache.logs[mask]
    phases = fractional_parts(theta, primes, config)
    value = _sharded_dot(logs, phases)
    return ExpSumResult(x, q, a % q, None, theta.describe(), value,
                        float(np.sum(logs)), int(primes.size))


def g_sum_twisted(x: int, ctx: GaloisContext, class_label: str,
                  chi: DirichletCharacter, theta: Frequency,
                  config: RunConfig = DEFAULT_CONFIG,
                  cache: Optional[ClassPrimeCache] = None) -> ExpSumResult:
    """sum over p <= X in the class of log(p) e(theta p) chi(p)."""
    cache = cache or ClassPrimeCache(ctx, x, config)
    mask = cache.class_mask(class_label)
    primes = cache.primes[mask]
    logs = cache.logs[mask]
    phases = fractional_parts(theta, primes, config)
    table = chi.value_table()
    weights = table[primes % chi.modulus] if chi.modulus > 1 \
        else np.ones(primes.size, dtype=np.complex128)
    value = _sharded_dot(logs, phases, weights)
    nz = weights != 0
    return ExpSumResult(x, chi.modulus, None, f"chi mod {chi.modulus}",
                        theta.describe(), value,
                        float(np.sum(logs[nz])), int(np.count_nonzero(nz)))


def orthogonality_combination(x: int, ctx: GaloisContext, class_label: str,
                              q: int, a: int, theta: Frequency,
                              config: RunConfig = DEFAULT_CONFIG,
                              cache: Optional[ClassPrimeCache] = None
                              ) -> complex:
    """(1/phi(q)) sum_chi conj(chi(a)) G_chi -- should equal the (q, a) sum."""
    from .galois import character_group
    cache = cache or ClassPrimeCache(ctx, x, config)
    chars = character_group(q, config)
    total = 0j
    comp = 0j
    for chi in chars:
        g = g_sum_twisted(x, ctx, class_label, chi, theta, config, cache)
        v = g.value * chi.value(a).conjugate()
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total / len(chars)


def error_budget(x: float, b: float, q: int, d: int) -> tuple[float, float]:
    """The explicit exponential-sum error envelope.

    E(X, B) = log^2 X * B^(-10^-d/12) + log^2 X * X^(-10^-d/60)
            + log^2 X * X^(-10^-d/10) + log^(2 + d^2/2) X * B^(-1/12),
    and the bound q^(d+1) * X * E(X, B).
    """
    if not x > b > 1:
        raise ValidationError("need X > B > 1")
    lx = math.log(x)
    eps = 10.0 ** (-d)
    e_val = (lx ** 2 * b ** (-eps / 12)
             + lx ** 2 * x ** (-eps / 60)
             + lx ** 2 * x ** (-eps / 10)
             + lx ** (2 + d * d / 2) * b ** (-1.0 / 12))
    return e_val, float(q) ** (d + 1) * x * e_val


def decay_report(ctx: GaloisContext, class_label: str,
                 theta_base: IrrationalNumber, k_max: int,
                 x_grid: list[int],
                 config: RunConfig = DEFAULT_CONFIG) -> dict:
    """Advisory table of |G|/X and |G|/theta_C(X) over k and X.

    The power-saving exponents established analytically are far too small to
    be visible at desk scale, so this report carries no pass/fail verdict;
    a rational control frequency (1/3) is included to show the contrast
    with a genuinely irrational frequency.
    """
    if k_max > 1000:
        raise BudgetExceeded("k_max capped at 1000")
    caches = {x: ClassPrimeCache(ctx, x, config) for x in sorted(x_grid)}
    rows = []
    slopes = {}
    for k in range(1, k_max + 1):
        freq = Frequency.from_irrational(theta_base, k)
        pts = []
        for x in sorted(x_grid):
            g = g_sum(x, ctx, class_label, 1, 0, freq, config, caches[x])
            rows.append({
                "k": k, "x": x, "abs_g": abs(g.value),
                "normalized": abs(g.value) / x,
                "trivial_bound": g.trivial_bound,
                "vs_trivial": abs(g.value) / g.trivial_bound
                if g.trivial_bound else None,
            })
            if abs(g.value) > 0:
                pts.append((math.log(x), math.log(abs(g.value))))
        if len(pts) >= 2:
            n = len(pts)
            mx = sum(p[0] for p in pts) / n
            my = sum(p[1] for p in pts) / n
            sxx = sum((p[0] - mx) ** 2 for p in pts)
            slopes[k] = sum((p[0] - mx) * (p[1] - my) for p in pts) / sxx
    control = []
    for x in sorted(x_grid):
        g = g_sum(x, ctx, class_label, 1, 0,
                  Frequency.from_rational(Fraction(1, 3)), config, caches[x])
        control.append({
            "x": x, "abs_g": abs(g.value), "trivial_bound": g.trivial_bound,
            "vs_trivial": abs(g.value) / g.trivial_bound
            if g.trivial_bound else None,
        })
    return {
        "advisory": ("log-log slopes are descriptive only; the analytic "
                     "decay exponents are not falsifiable at this scale"),
        "rows": rows,
        "fitted_slopes": slopes,
        "rational_control": control,
    }

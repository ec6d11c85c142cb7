"""Certified arbitrary-precision access to irrational constants.

Every value is queryable through ``enclose(g)``, which returns a dyadic
interval of width at most 2^-g guaranteed to contain the true value.
Built-in constants are computed from scratch by fast converging series with
explicit tail bounds (Machin's arctangent formula for pi, the factorial
series for e), so no stored constant tables are involved.  Quadratic surds
(a + b*sqrt(D))/c reduce to integer square roots and are exact at every
precision.  Derived values (reciprocals, rational affine images, products)
refine their operands adaptively until the requested output width is met.

On top of the enclosures sit the classical Diophantine tools: certified
continued-fraction convergents, denominator-window rational approximations,
and an empirical estimator for the approximation type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Union

from .config import DEFAULT_CONFIG, RunConfig
from .errors import (
    ApproximationNotFound,
    BudgetExceeded,
    DigitStreamError,
    InvalidSurd,
    PrecisionExhausted,
    ValidationError,
)

Interval = tuple[Fraction, Fraction]

RealLike = Union[int, Fraction, "IrrationalNumber"]


def _isqrt_is_exact(d: int) -> bool:
    r = math.isqrt(d)
    return r * r == d


class IrrationalNumber:
    """A real number with certified dyadic enclosures of any requested width.

    Subclasses implement ``_refine(g)`` returning an interval of width at
    most 2^-g.  ``enclose`` caches the best interval seen so far and always
    returns intersections with it, so refinement is monotone: higher g gives
    nested intervals.
    """

    def __init__(self) -> None:
        self._best: Optional[Interval] = None

    def _refine(self, g: int) -> Interval:
        raise NotImplementedError

    def enclose(self, g: int, config: RunConfig = DEFAULT_CONFIG) -> Interval:
        if g > config.g_max_bits:
            raise PrecisionExhausted(
                f"requested {g} bits exceeds cap {config.g_max_bits}")
        if self._best is not None:
            lo, hi = self._best
            if hi - lo <= Fraction(1, 1 << g):
                return self._best
        lo, hi = self._refine(g)
        if self._best is not None:
            blo, bhi = self._best
            lo, hi = max(lo, blo), min(hi, bhi)
            if lo > hi:  # pragma: no cover - would indicate a refinement bug
                raise AssertionError("inconsistent enclosures")
        self._best = (lo, hi)
        return self._best

    # float convenience (never used inside certified decisions)
    def to_float(self, config: RunConfig = DEFAULT_CONFIG) -> float:
        lo, hi = self.enclose(80, config)
        return float((lo + hi) / 2)

    def scaled_int(self, bits: int,
                   config: RunConfig = DEFAULT_CONFIG) -> tuple[int, int]:
        """Return (n, err) with |value * 2^bits - n| <= err and err <= 2."""
        lo, hi = self.enclose(bits, config)
        n = (lo * (1 << bits)).__floor__()
        # value*2^bits lies in [lo*2^bits, hi*2^bits) subset [n, n+2)
        return n, 2

    # -- arithmetic helpers producing derived certified values --------------

    def reciprocal(self) -> "IrrationalNumber":
        return _Reciprocal(self)

    def affine(self, mul: Fraction, add: Fraction) -> "IrrationalNumber":
        """mul*self + add for rational mul != 0, add."""
        if mul == 0:
            raise ValidationError("affine image with mul=0 is rational")
        return _Affine(self, Fraction(mul), Fraction(add))

    def mul_irrational(self, other: "IrrationalNumber") -> "IrrationalNumber":
        return _Product(self, other)


class Pi(IrrationalNumber):
    """pi via Machin's formula 16*atan(1/5) - 4*atan(1/239), integer arithmetic."""

    def _refine(self, g: int) -> Interval:
        s = g + 16
        while True:
            n5, e5 = _atan_inv_scaled(5, s)
            n239, e239 = _atan_inv_scaled(239, s)
            n = 16 * n5 - 4 * n239
            err = 16 * e5 + 4 * e239
            if 2 * err <= (1 << (s - g)):
                one = 1 << s
                return (Fraction(n - err, one), Fraction(n + err, one))
            s += 16


def _atan_inv_scaled(x: int, s: int) -> tuple[int, int]:
    """floor-ish of atan(1/x)*2^s with a certified absolute error bound.

    atan(1/x) = sum_{k>=0} (-1)^k / ((2k+1) x^(2k+1)); each term is floored
    (error <= 1 scaled unit), and the alternating tail is below the first
    omitted term, which is < 1 once the loop stops.
    """
    total = 0
    err = 0
    xx = x * x
    xpow = x
    k = 0
    while True:
        t = (1 << s) // ((2 * k + 1) * xpow)
        if t == 0:
            err += 1  # tail bound
            break
        total += -t if (k & 1) else t
        err += 1
        xpow *= xx
        k += 1
    return total, err


class EulerE(IrrationalNumber):
    """e via the factorial series with floored partial terms."""

    def _refine(self, g: int) -> Interval:
        s = g + 16
        while True:
            total = 1 << s          # k = 0 term
            term = 1 << s
            err = 0
            k = 1
            while term:
                term //= k
                total += term
                err += 1            # floor error per term
                k += 1
            err += 2                # tail: sum_{j>=k} 1/j! < 2/k! < 2 units
            if 2 * err <= (1 << (s - g)):
                one = 1 << s
                return (Fraction(total - err, one), Fraction(total + err, one))
            s += 16


class QuadraticSurd(IrrationalNumber):
    """(a + b*sqrt(D)) / c with integer a, b, c and non-square D > 0."""

    def __init__(self, a: int, b: int, c: int, d: int) -> None:
        super().__init__()
        if c == 0:
            raise InvalidSurd("denominator c must be nonzero")
        if b == 0:
            raise InvalidSurd("b = 0 makes the value rational")
        if d <= 0 or _isqrt_is_exact(d):
            raise InvalidSurd(f"D = {d} must be positive and not a perfect square")
        self.a, self.b, self.c, self.d = int(a), int(b), int(c), int(d)

    def _refine(self, g: int) -> Interval:
        s = g + max(0, self.b.bit_length() + 2 - self.c.bit_length()) + 4
        r = math.isqrt(self.d << (2 * s))
        lo_r = Fraction(r, 1 << s)
        hi_r = Fraction(r + 1, 1 << s)
        if self.b > 0:
            lo = (Fraction(self.a) + self.b * lo_r) / self.c
            hi = (Fraction(self.a) + self.b * hi_r) / self.c
        else:
            lo = (Fraction(self.a) + self.b * hi_r) / self.c
            hi = (Fraction(self.a) + self.b * lo_r) / self.c
        if self.c < 0:
            lo, hi = hi, lo
        assert lo <= hi
        if hi - lo > Fraction(1, 1 << g):
            return self._refine(g + 8)  # pragma: no cover - slack is generous
        return (lo, hi)


class DigitStream(IrrationalNumber):
    """A decimal expansion read from a plain text file.

    Format: optional sign, integer part, '.', then decimal digits.  The
    stream is declared irrational by the user; precision is capped by the
    number of digits available (PrecisionExhausted beyond it).
    """

    def __init__(self, path: str) -> None:
        super().__init__()
        try:
            with open(path, "r", encoding="ascii") as fh:
                text = "".join(fh.read().split())
        except OSError as exc:
            raise DigitStreamError(f"cannot read digit stream: {exc}") from exc
        neg = text.startswith("-")
        if neg:
            text = text[1:]
        if "." not in text:
            raise DigitStreamError("digit stream must contain a decimal point")
        ipart, fpart = text.split(".", 1)
        if not ipart.isdigit() or not fpart.isdigit() or not fpart:
            raise DigitStreamError("digit stream must be digits '.' digits")
        self.path = path
        scale = 10 ** len(fpart)
        v = int(ipart) * scale + int(fpart)
        self._lo = Fraction(-v - 1 if neg else v, scale)
        self._hi = Fraction(-v if neg else v + 1, scale)

    def _refine(self, g: int) -> Interval:
        if self._hi - self._lo > Fraction(1, 1 << g):
            raise PrecisionExhausted(
                f"digit stream {self.path!r} has only "
                f"{math.floor(-math.log2(float(self._hi - self._lo)))} certified bits")
        return (self._lo, self._hi)


class _Derived(IrrationalNumber):
    """Base for values defined by interval arithmetic on other enclosures."""

    def _image(self, g_work: int, config: RunConfig) -> Interval:
        raise NotImplementedError

    def _refine(self, g: int) -> Interval:
        config = DEFAULT_CONFIG
        g_work = g + 8
        target = Fraction(1, 1 << g)
        while True:
            lo, hi = self._image(g_work, config)
            if hi - lo <= target:
                return (lo, hi)
            if g_work >= config.g_max_bits:
                raise PrecisionExhausted(
                    "derived value did not reach requested width at cap")
            g_work = min(2 * g_work, config.g_max_bits)


class _Reciprocal(_Derived):
    def __init__(self, x: IrrationalNumber) -> None:
        super().__init__()
        self.x = x

    def _image(self, g_work: int, config: RunConfig) -> Interval:
        lo, hi = self.x.enclose(g_work, config)
        if lo <= 0 <= hi:
            raise PrecisionExhausted("reciprocal of interval containing zero")
        a, b = 1 / hi, 1 / lo
        return (a, b) if a <= b else (b, a)


class _Affine(_Derived):
    def __init__(self, x: IrrationalNumber, mul: Fraction, add: Fraction) -> None:
        super().__init__()
        self.x, self.mul, self.add = x, mul, add

    def _image(self, g_work: int, config: RunConfig) -> Interval:
        lo, hi = self.x.enclose(g_work, config)
        a = self.mul * lo + self.add
        b = self.mul * hi + self.add
        return (a, b) if a <= b else (b, a)


class _Product(_Derived):
    def __init__(self, x: IrrationalNumber, y: IrrationalNumber) -> None:
        super().__init__()
        self.x, self.y = x, y

    def _image(self, g_work: int, config: RunConfig) -> Interval:
        xlo, xhi = self.x.enclose(g_work, config)
        ylo, yhi = self.y.enclose(g_work, config)
        cands = (xlo * ylo, xlo * yhi, xhi * ylo, xhi * yhi)
        return (min(cands), max(cands))


# -- constructors -------------------------------------------------------------

_BUILTINS = {"pi": Pi, "e": EulerE}


def make_constant(spec: str) -> IrrationalNumber:
    """Parse an alpha/irrational spec: pi | e | sqrtD | surd:a,b,c,D | file:PATH."""
    spec = spec.strip()
    if spec in _BUILTINS:
        return _BUILTINS[spec]()
    if spec.startswith("sqrt"):
        try:
            d = int(spec[4:])
        except ValueError as exc:
            raise ValidationError(f"bad sqrt spec {spec!r}") from exc
        return QuadraticSurd(0, 1, 1, d)
    if spec.startswith("surd:"):
        parts = spec[5:].split(",")
        if len(parts) != 4:
            raise ValidationError("surd spec needs a,b,c,D")
        try:
            a, b, c, d = (int(p) for p in parts)
        except ValueError as exc:
            raise ValidationError(f"bad surd spec {spec!r}") from exc
        return QuadraticSurd(a, b, c, d)
    if spec.startswith("file:"):
        return DigitStream(spec[5:])
    raise ValidationError(f"unknown irrational spec {spec!r}")


# -- fractional parts ---------------------------------------------------------

@dataclass(frozen=True)
class FracInterval:
    """Enclosure of a fractional part, possibly wrapped around 1 -> 0.

    ``main`` is a subinterval of [0, 1).  If the original enclosure straddles
    an integer boundary, ``wrapped`` holds the second piece (starting at 0)
    and callers must treat the value as lying in the union.
    """
    main: Interval
    wrapped: Optional[Interval] = None

    def parts(self) -> list[Interval]:
        return [self.main] if self.wrapped is None else [self.main, self.wrapped]

    def width(self) -> Fraction:
        w = self.main[1] - self.main[0]
        if self.wrapped is not None:
            w += self.wrapped[1] - self.wrapped[0]
        return w


def frac_interval(lo: Fraction, hi: Fraction) -> FracInterval:
    """Reduce the interval [lo, hi] modulo 1."""
    if hi - lo >= 1:
        raise ValidationError("interval of width >= 1 has no useful fractional part")
    k = lo.__floor__()
    lo2, hi2 = lo - k, hi - k
    if hi2 < 1:
        return FracInterval((lo2, hi2))
    return FracInterval((lo2, Fraction(1)), (Fraction(0), hi2 - 1))


def frac_linear(x: IrrationalNumber, m: int, shift: RealLike, g: int,
                config: RunConfig = DEFAULT_CONFIG) -> FracInterval:
    """Certified enclosure of {x*m + shift} with total width <= 2^-g."""
    if abs(m) > 1 << 62:
        raise ValidationError("|m| exceeds 2^62")
    if m == 0 and not isinstance(shift, IrrationalNumber):
        f = Fraction(shift)
        f -= f.__floor__()
        return FracInterval((f, f))
    target = Fraction(1, 1 << g)
    g_work = g + max(1, abs(m)).bit_length() + 4
    while True:
        lo, hi = x.enclose(g_work, config)
        lo, hi = (lo * m, hi * m) if m >= 0 else (hi * m, lo * m)
        if isinstance(shift, IrrationalNumber):
            slo, shi = shift.enclose(g_work, config)
        else:
            slo = shi = Fraction(shift)
        lo, hi = lo + slo, hi + shi
        if hi - lo <= target:
            return frac_interval(lo, hi)
        if g_work >= config.g_max_bits:
            raise PrecisionExhausted("frac_linear cannot reach requested width")
        g_work = min(2 * g_work, config.g_max_bits)


# -- continued fractions ------------------------------------------------------

@dataclass(frozen=True)
class RationalApprox:
    """A certified rational approximation r/s with |x - r/s| <= gap < 1/s^2."""
    r: int
    s: int
    gap: Fraction

    def __post_init__(self) -> None:
        if self.s <= 0:
            raise ValidationError("denominator must be positive")
        if math.gcd(self.r, self.s) != 1:
            raise ValidationError("r/s must be in lowest terms")
        if self.gap >= Fraction(1, self.s * self.s):
            raise ValidationError("certified gap must be below 1/s^2")

    @property
    def value(self) -> Fraction:
        return Fraction(self.r, self.s)


class _NeedMorePrecision(Exception):
    pass


def _cf_scan(lo: Fraction, hi: Fraction) -> Iterator[tuple[int, int, int]]:
    """Yield certified (a_i, p_i, q_i) while the interval pins the quotient."""
    p0, q0 = 1, 0
    p1, q1 = 0, 1
    while True:
        a = lo.__floor__()
        if hi.__floor__() != a:
            raise _NeedMorePrecision
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield a, p1, q1
        lo2, hi2 = lo - a, hi - a
        if lo2 == 0:
            raise _NeedMorePrecision
        lo, hi = 1 / hi2, 1 / lo2


def convergents(x: IrrationalNumber, n: int,
                config: RunConfig = DEFAULT_CONFIG) -> list[RationalApprox]:
    """First n continued-fraction convergents with certified gap bounds."""
    if n < 1:
        raise ValidationError("need n >= 1 convergents")
    if n > config.max_convergents:
        raise BudgetExceeded(
            f"requested {n} convergents exceeds budget {config.max_convergents}")
    g = 128
    while True:
        lo, hi = x.enclose(g, config)
        out: list[RationalApprox] = []
        try:
            for _, p, q in _cf_scan(lo, hi):
                gap = max(abs(lo - Fraction(p, q)), abs(hi - Fraction(p, q)))
                if gap >= Fraction(1, q * q):
                    raise _NeedMorePrecision
                out.append(RationalApprox(p, q, gap))
                if len(out) == n:
                    return out
        except _NeedMorePrecision:
            pass
        if g >= config.g_max_bits:
            raise PrecisionExhausted(
                f"cannot certify {n} partial quotients within {config.g_max_bits} bits")
        g = min(2 * g, config.g_max_bits)


def convergents_up_to_denominator(x: IrrationalNumber, q_max: int,
                                  config: RunConfig = DEFAULT_CONFIG
                                  ) -> list[RationalApprox]:
    """All convergents with denominator <= q_max (certified)."""
    g = 128
    while True:
        lo, hi = x.enclose(g, config)
        out: list[RationalApprox] = []
        try:
            for _, p, q in _cf_scan(lo, hi):
                if q > q_max:
                    return out
                gap = max(abs(lo - Fraction(p, q)), abs(hi - Fraction(p, q)))
                if gap >= Fraction(1, q * q):
                    raise _NeedMorePrecision
                out.append(RationalApprox(p, q, gap))
        except _NeedMorePrecision:
            pass
        if g >= config.g_max_bits:
            raise PrecisionExhausted(
                f"cannot certify convergents up to denominator {q_max}")
        g = min(2 * g, config.g_max_bits)


def good_approx(x: IrrationalNumber, b: float, big_x: float,
                config: RunConfig = DEFAULT_CONFIG) -> RationalApprox:
    """Largest-denominator convergent r/s with b < s < big_x/b.

    Raises ApproximationNotFound when no convergent denominator lands in the
    window; the window can legitimately be empty.
    """
    if not (1 < b and b * b < big_x):
        raise ValidationError("need 1 < B < sqrt(X)")
    upper = big_x / b
    cands = [c for c in convergents_up_to_denominator(
        x, int(math.floor(upper)), config) if b < c.s < upper]
    if not cands:
        raise ApproximationNotFound(
            f"no convergent denominator in ({b}, {upper})")
    return cands[-1]


def estimate_type(x: IrrationalNumber, q_limit: int,
                  config: RunConfig = DEFAULT_CONFIG) -> float:
    """Empirical lower estimate of the approximation type of x.

    For each convergent denominator s <= q_limit the distance ||s*x|| to the
    nearest integer is computed with certified intervals; the estimate is the
    least-squares slope of log(1/||s*x||) against log(s), clamped below at 1.
    The clamp is the only certified part (every irrational has type >= 1 by
    Dirichlet's theorem); the slope itself cancels the multiplicative
    constant in ||s*x|| ~ c/s^tau that a pointwise max would absorb into the
    exponent at small denominators.
    """
    if q_limit < 10:
        raise ValidationError("need Q >= 10")
    pts: list[tuple[float, float]] = []
    for c in convergents_up_to_denominator(x, q_limit, config):
        d = _cert_dist_to_nearest_int(x, c.s, config)
        pts.append((math.log(c.s), math.log(1 / d)))
    if len(pts) < 2:
        raise PrecisionExhausted("fewer than two convergents below Q")
    n = len(pts)
    mx = sum(p[0] for p in pts) / n
    my = sum(p[1] for p in pts) / n
    sxx = sum((p[0] - mx) ** 2 for p in pts)
    sxy = sum((p[0] - mx) * (p[1] - my) for p in pts)
    return max(1.0, sxy / sxx)


def _cert_dist_to_nearest_int(x: IrrationalNumber, s: int,
                              config: RunConfig) -> float:
    """||s*x|| with certified relative accuracy ~2^-20."""
    g = 64
    while True:
        lo, hi = x.enclose(g, config)
        lo, hi = lo * s, hi * s
        mid = (lo + hi) / 2
        nearest = (mid + Fraction(1, 2)).__floor__()
        dlo = min(abs(lo - nearest), abs(hi - nearest))
        dhi = max(abs(lo - nearest), abs(hi - nearest))
        if lo <= nearest <= hi:
            dlo = Fraction(0)
        width = hi - lo
        if dlo > 0 and width <= dlo / (1 << 20):
            return float((dlo + dhi) / 2)
        if g >= config.g_max_bits:
            raise PrecisionExhausted(f"cannot certify ||{s}*x||")
        g = min(2 * g, config.g_max_bits)

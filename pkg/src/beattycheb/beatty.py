"""Beatty sequences: terms, certified membership, the smoothed indicator,
and discrepancy of the underlying fractional-part sequence.

Membership uses the elementary criterion: for alpha > 1, an integer m equals
floor(alpha*n + beta) for some n exactly when 0 < {gamma*(m - beta + 1)} <=
gamma with gamma = 1/alpha, and n is then unique.  All decisions are made on
certified intervals with precision escalation; a tie that cannot be resolved
at the precision cap raises rather than guessing.

The smoothed indicator is the double box-convolution of the sharp indicator
of (0, gamma]: coefficient magnitudes |sin(pi k gamma)|/(pi k) *
(sin(pi k Delta)/(pi k Delta))^2 provably satisfy the uniform bound
min(2/(pi k), 2/(pi^2 k^2 Delta)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .errors import (
    AlphaNotGreaterThanOne,
    BudgetExceeded,
    InvalidDelta,
    PrecisionExhausted,
    ValidationError,
)
from .irrationals import (
    FracInterval,
    IrrationalNumber,
    frac_interval,
)

BetaLike = Union[int, Fraction, IrrationalNumber]


class BeattyParams:
    """The pair (alpha, beta) with derived gamma = 1/alpha and
    delta = gamma*(1 - beta)."""

    def __init__(self, alpha: IrrationalNumber, beta: BetaLike = 0,
                 config: RunConfig = DEFAULT_CONFIG) -> None:
        if not isinstance(alpha, IrrationalNumber):
            raise ValidationError("alpha must be an IrrationalNumber")
        self.alpha = alpha
        self.beta: BetaLike = beta if isinstance(beta, IrrationalNumber) \
            else Fraction(beta)
        self.config = config
        # certify alpha > 1
        g = 32
        while True:
            lo, hi = alpha.enclose(g, config)
            if lo > 1:
                break
            if hi <= 1:
                raise AlphaNotGreaterThanOne(
                    "membership requires alpha > 1 (alpha <= 1 makes every "
                    "integer a term)")
            if g >= config.g_max_bits:
                raise PrecisionExhausted("cannot separate alpha from 1")
            g = min(2 * g, config.g_max_bits)
        self.gamma = alpha.reciprocal()
        if isinstance(self.beta, Fraction):
            if self.beta == 1:
                # delta = 0 exactly; keep a rational marker
                self.delta: Optional[IrrationalNumber] = None
                self._delta_rational = Fraction(0)
            else:
                self.delta = self.gamma.affine(1 - self.beta, Fraction(0))
                self._delta_rational = None
        else:
            one_minus_beta = self.beta.affine(Fraction(-1), Fraction(1))
            self.delta = self.gamma.mul_irrational(one_minus_beta)
            self._delta_rational = None

    def gamma_float(self) -> float:
        return self.gamma.to_float(self.config)

    def alpha_float(self) -> float:
        return self.alpha.to_float(self.config)


def beatty_term(n: int, params: BeattyParams,
                config: Optional[RunConfig] = None) -> int:
    """floor(alpha*n + beta), the floor certified by interval refinement."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    config = config or params.config
    g = 64
    while True:
        lo, hi = params.alpha.enclose(g, config)
        lo, hi = lo * n, hi * n
        if isinstance(params.beta, IrrationalNumber):
            blo, bhi = params.beta.enclose(g, config)
        else:
            blo = bhi = params.beta
        lo, hi = lo + blo, hi + bhi
        if lo.__floor__() == hi.__floor__():
            return int(lo.__floor__())
        if g >= config.g_max_bits:
            raise PrecisionExhausted(
                f"floor(alpha*{n}+beta) straddles an integer at the cap")
        g = min(2 * g, config.g_max_bits)


def _membership_value(m: int, params: BeattyParams, g_work: int,
                      config: RunConfig) -> FracInterval:
    """Enclosure of {gamma * (m - beta + 1)}."""
    glo, ghi = params.gamma.enclose(g_work, config)
    if isinstance(params.beta, IrrationalNumber):
        blo, bhi = params.beta.enclose(g_work, config)
        tlo, thi = m + 1 - bhi, m + 1 - blo
    else:
        tlo = thi = m + 1 - params.beta
    cands = (glo * tlo, glo * thi, ghi * tlo, ghi * thi)
    return frac_interval(min(cands), max(cands))


def is_member(m: int, params: BeattyParams,
              config: Optional[RunConfig] = None) -> bool:
    """True iff m = floor(alpha*n + beta) for some integer n (certified)."""
    if m < 1:
        raise ValidationError("m must be >= 1")
    config = config or params.config
    g = 64
    while True:
        glo, ghi = params.gamma.enclose(g, config)
        fi = _membership_value(m, params, g, config)
        inside = all(lo > 0 and hi <= glo for lo, hi in fi.parts())
        outside = all(lo > ghi for lo, hi in fi.parts())
        if inside:
            return True
        if outside:
            return False
        if g >= config.g_max_bits:
            raise PrecisionExhausted(
                f"membership of {m} undecidable at {config.g_max_bits} bits "
                "(fractional part ties the boundary)")
        g = min(2 * g, config.g_max_bits)


class MembershipSieve:
    """Bulk Beatty membership with one certified scaled-integer pass.

    With N_g ~ gamma*2^s and N_d ~ delta*2^s certified to +-2 units, the
    fractional part of gamma*m + delta sits within (m+1)*2 + 1 scale units of
    ((N_g*m + N_d) mod 2^s), leaving a huge decision margin at s = 192 for
    any m below 2^62; the rare undecided case falls back to the escalating
    single-value test.
    """

    def __init__(self, params: BeattyParams,
                 config: Optional[RunConfig] = None) -> None:
        self.params = params
        self.config = config or params.config
        s = self.config.membership_bits
        self.s = s
        self.mask = (1 << s) - 1
        ng, eg = params.gamma.scaled_int(s, self.config)
        if params.delta is None:
            nd, ed = (0, 0)
            if params._delta_rational != 0:  # pragma: no cover
                raise AssertionError("rational delta marker out of sync")
        else:
            nd, ed = params.delta.scaled_int(s, self.config)
        self.ng, self.eg, self.nd, self.ed = ng, eg, nd, ed

    def contains(self, m: int) -> bool:
        t = (self.ng * m + self.nd) & self.mask
        slack = m * self.eg + self.ed + 1
        lo_gamma = self.ng - self.eg
        if slack < t <= lo_gamma - slack:
            return True
        if t > self.ng + self.eg + slack and t < (1 << self.s) - slack:
            return False
        return is_member(m, self.params, self.config)

    def mask_for(self, ms) -> np.ndarray:
        """Boolean membership mask for an iterable of integers."""
        return np.fromiter((self.contains(int(m)) for m in ms),
                           dtype=bool, count=len(ms))


# -- smoothed indicator --------------------------------------------------------

@dataclass(frozen=True)
class PsiDelta:
    """Truncated Fourier model of the smoothed Beatty indicator.

    g[k-1], h[k-1] hold the coefficients of e(kx) and e(-kx); eps_k bounds
    the truncation error of the K-term evaluation.
    """
    gamma: float
    delta_width: float
    k_terms: int
    g: np.ndarray
    h: np.ndarray

    @property
    def eps_k(self) -> float:
        # tail: sum_{k>K} (|g_k|+|h_k|) <= 2/(pi^3 Delta^2) * sum k^-3
        #       < 1/(pi^3 Delta^2 K^2)
        return 1.0 / (math.pi ** 3 * self.delta_width ** 2 * self.k_terms ** 2)

    def coefficient_bound(self, k: int) -> float:
        return min(2.0 / (math.pi * k),
                   2.0 / (math.pi ** 2 * k * k * self.delta_width))


def build_psi_delta(gamma: float, delta_width: float, k_terms: int) -> PsiDelta:
    """Double box-convolution smoothing of the (0, gamma] indicator."""
    if not 0 < gamma < 1:
        raise ValidationError("gamma must be in (0, 1)")
    if not (0 < delta_width < 0.125
            and delta_width <= 0.5 * min(gamma, 1 - gamma)):
        raise InvalidDelta(
            "need 0 < Delta < 1/8 and Delta <= min(gamma, 1-gamma)/2")
    if k_terms < 1:
        raise ValidationError("need K >= 1")
    k = np.arange(1, k_terms + 1, dtype=np.float64)
    sinc = np.sin(math.pi * k * delta_width) / (math.pi * k * delta_width)
    mag = np.sin(math.pi * k * gamma) / (math.pi * k) * sinc * sinc
    phase = np.exp(-1j * math.pi * k * gamma)
    g = phase * mag
    h = np.conj(g)
    return PsiDelta(gamma, delta_width, k_terms, g, h)


def eval_psi_delta(psi: PsiDelta, x) -> np.ndarray:
    """Evaluate the truncated series at x (scalar or array), x reduced mod 1."""
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64)) % 1.0
    k = np.arange(1, psi.k_terms + 1, dtype=np.float64)
    out = np.empty(xs.size, dtype=np.float64)
    chunk = max(1, 4_000_000 // max(1, psi.k_terms))
    for i in range(0, xs.size, chunk):
        sub = xs[i: i + chunk]
        ph = np.exp(2j * math.pi * np.outer(sub, k))
        out[i: i + chunk] = psi.gamma + 2.0 * np.real(ph @ psi.g)
    return out if np.ndim(x) else float(out[0])


# -- discrepancy ---------------------------------------------------------------

def fractional_orbit(gamma: IrrationalNumber, delta, m_count: int,
                     config: RunConfig = DEFAULT_CONFIG) -> np.ndarray:
    """{gamma*m + delta} for m = 1..M as float64 (certified to ~2^-100)."""
    s = 160
    ng, _ = gamma.scaled_int(s, config)
    if isinstance(delta, IrrationalNumber):
        nd, _ = delta.scaled_int(s, config)
    else:
        d = Fraction(delta)
        nd = (d * (1 << s)).__floor__()
    mask = (1 << s) - 1
    scale = float(1 << s)
    out = np.empty(m_count, dtype=np.float64)
    acc = nd
    for m in range(1, m_count + 1):
        acc = (acc + ng) & mask
        out[m - 1] = acc / scale
    return out


def discrepancy(gamma: IrrationalNumber, delta, m_count: int,
                config: RunConfig = DEFAULT_CONFIG
                ) -> tuple[float, float, float]:
    """(D_star, lower, upper) for the points {gamma*m + delta}, m <= M.

    D_star is the star discrepancy from the classical sorted-sample formula;
    [D_star, 2*D_star] brackets the all-subintervals discrepancy.
    """
    if not 1 <= m_count <= config.max_discrepancy_m:
        raise BudgetExceeded(
            f"M = {m_count} outside [1, {config.max_discrepancy_m}]")
    pts = np.sort(fractional_orbit(gamma, delta, m_count, config))
    return star_discrepancy_sorted(pts)


def star_discrepancy_sorted(pts: np.ndarray) -> tuple[float, float, float]:
    m = pts.size
    i = np.arange(1, m + 1, dtype=np.float64)
    d_star = float(np.max(np.maximum(i / m - pts, pts - (i - 1) / m)))
    return d_star, d_star, 2.0 * d_star

"""Joint prime counts over Chebotarev classes and Beatty membership, and the
density tables built from them.

Two counting modes are supported.  UPTO_X counts all primes p <= X, with
denominators pi(X).  FIRST_N counts over the first N primes that do not
divide the field discriminant (the ramified primes are excluded from both
numerator and denominator), which is the convention the proportion tables
are quoted in.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .beatty import BeattyParams, MembershipSieve
from .config import DEFAULT_CONFIG, RunConfig
from .errors import BudgetExceeded, ValidationError
from .galois import GaloisContext, classify_primes
from .primes import iter_prime_blocks


class CountMode(enum.Enum):
    UPTO_X = "upto-x"
    FIRST_N = "first-n"


@dataclass(frozen=True)
class Checkpoint:
    """Exact counts at one cut (p <= X or first N usable primes)."""
    x: int                      # the checkpoint value (X or N)
    pi: int                     # denominator population (see mode)
    ramified: int               # ramified primes seen (UPTO_X only)
    pi_beatty: int
    pi_class: dict[str, int]
    pi_joint: dict[str, int]


@dataclass(frozen=True)
class JointCountTable:
    mode: CountMode
    labels: tuple[str, ...]
    checkpoints: tuple[Checkpoint, ...]
    q: Optional[int] = None
    a: Optional[int] = None

    def check_invariants(self) -> None:
        for cp in self.checkpoints:
            class_sum = sum(cp.pi_class.values())
            if self.mode is CountMode.UPTO_X and self.q is None:
                if class_sum + cp.ramified != cp.pi:
                    raise AssertionError("class counts do not partition pi")
            for lab in self.labels:
                if not (0 <= cp.pi_joint[lab]
                        <= min(cp.pi_class[lab], cp.pi_beatty) <= cp.pi):
                    raise AssertionError("count monotonicity violated")


def classified_stream(ctx: GaloisContext, beatty: BeattyParams,
                      config: RunConfig = DEFAULT_CONFIG):
    """Yield (primes, class_idx, beatty_mask) blocks in ascending order.

    class_idx is -1 on ramified primes; the Beatty mask is certified.
    """
    sieve = MembershipSieve(beatty, config)
    for block in iter_prime_blocks(2, config):
        primes = block.primes
        if primes.size == 0:
            yield primes, np.empty(0, dtype=np.int8), np.empty(0, dtype=bool)
            continue
        cls = classify_primes(primes, ctx, config)
        member = sieve.mask_for(primes)
        yield primes, cls, member


def joint_count(checkpoints: Sequence[int], ctx: GaloisContext,
                beatty: BeattyParams, q: Optional[int] = None,
                a: Optional[int] = None, mode: CountMode = CountMode.UPTO_X,
                config: RunConfig = DEFAULT_CONFIG) -> JointCountTable:
    """Exact joint counts at each checkpoint, by one streaming pass."""
    if not checkpoints:
        raise ValidationError("need at least one checkpoint")
    cps = sorted(int(c) for c in checkpoints)
    if cps[0] < 1:
        raise ValidationError("checkpoints must be positive")
    if q is not None:
        if a is None or math.gcd(a, q) != 1:
            raise ValidationError("need a with gcd(a, q) = 1")
    limit = cps[-1]
    if mode is CountMode.UPTO_X and limit > config.max_stream_x:
        raise BudgetExceeded(f"X = {limit} exceeds budget {config.max_stream_x}")
    if mode is CountMode.FIRST_N and limit > config.max_stream_x // 10:
        raise BudgetExceeded(f"N = {limit} exceeds budget")

    labels = ctx.class_labels()
    n_pi = 0
    n_ram = 0
    n_beatty = 0
    n_class = {lab: 0 for lab in labels}
    n_joint = {lab: 0 for lab in labels}
    done: list[Checkpoint] = []
    next_idx = 0

    def snapshot(cpv: int) -> Checkpoint:
        return Checkpoint(cpv, n_pi, n_ram, n_beatty, dict(n_class),
                          dict(n_joint))

    for primes, cls, member in classified_stream(ctx, beatty, config):
        keep = np.ones(primes.size, dtype=bool)
        if q is not None:
            keep &= (primes % q == a % q)
        for i in range(primes.size):
            p = int(primes[i])
            if mode is CountMode.UPTO_X:
                while next_idx < len(cps) and p > cps[next_idx]:
                    done.append(snapshot(cps[next_idx]))
                    next_idx += 1
                if next_idx >= len(cps):
                    break
            ci = int(cls[i])
            usable = ci >= 0
            if mode is CountMode.FIRST_N and not usable:
                continue
            if mode is CountMode.FIRST_N and not keep[i]:
                # residue-filtered FIRST_N counts only matching primes
                continue
            if mode is CountMode.UPTO_X:
                n_pi += 1 if keep[i] else 0
                if not keep[i]:
                    continue
            else:
                n_pi += 1
            if not usable:
                n_ram += 1
            mem = bool(member[i])
            if mem:
                n_beatty += 1
            if usable:
                lab = labels[ci]
                n_class[lab] += 1
                if mem:
                    n_joint[lab] += 1
            if mode is CountMode.FIRST_N:
                while next_idx < len(cps) and n_pi == cps[next_idx]:
                    done.append(snapshot(cps[next_idx]))
                    next_idx += 1
                if next_idx >= len(cps):
                    break
        if next_idx >= len(cps):
            break

    while next_idx < len(cps):  # checkpoints beyond the stream end (UPTO_X)
        done.append(snapshot(cps[next_idx]))
        next_idx += 1
    table = JointCountTable(mode, tuple(labels), tuple(done), q, a)
    table.check_invariants()
    return table


# -- density table -------------------------------------------------------------

@dataclass(frozen=True)
class DensityRow:
    n: int
    beatty: float
    per_class: dict[str, float]
    per_joint: dict[str, float]
    class_sum: float


@dataclass(frozen=True)
class DensityTable:
    labels: tuple[str, ...]
    rows: tuple[DensityRow, ...]
    limit_row: dict[str, float]
    mode: CountMode
    flags: tuple[str, ...] = ()

    def row_values(self, row: DensityRow) -> list[float]:
        vals = [row.beatty]
        vals += [row.per_class[lab] for lab in self.labels]
        vals += [row.per_joint[lab] for lab in self.labels]
        return vals


def density_table(ctx: GaloisContext, beatty: BeattyParams,
                  n_list: Sequence[int], mode: CountMode = CountMode.FIRST_N,
                  config: RunConfig = DEFAULT_CONFIG) -> DensityTable:
    """Proportion table over the checkpoints plus the analytic limit row."""
    table = joint_count(n_list, ctx, beatty, mode=mode, config=config)
    labels = table.labels
    rows = []
    for cp in table.checkpoints:
        denom = cp.pi if mode is CountMode.FIRST_N else cp.pi
        denom = max(denom, 1)
        per_class = {lab: cp.pi_class[lab] / denom for lab in labels}
        per_joint = {lab: cp.pi_joint[lab] / denom for lab in labels}
        rows.append(DensityRow(
            n=cp.x, beatty=cp.pi_beatty / denom, per_class=per_class,
            per_joint=per_joint, class_sum=sum(per_class.values())))
    inv_alpha = 1.0 / beatty.alpha_float()
    limit = {"beatty": inv_alpha}
    for lab in labels:
        frac = float(Fraction(ctx.get_class(lab).size, ctx.group_order))
        limit[f"class:{lab}"] = frac
        limit[f"joint:{lab}"] = frac * inv_alpha
    flags = []
    for row in rows:
        if row.class_sum > 1.0 + 1e-12:
            flags.append(
                f"row {row.n}: class densities sum to {row.class_sum:.4f} > 1")
    return DensityTable(labels, tuple(rows), limit, mode, tuple(flags))


def compare_with_reference(table: DensityTable,
                           reference_rows: dict[int, Sequence[float]],
                           tolerance: float) -> list[str]:
    """Flag computed-vs-published cells that disagree beyond `tolerance`.

    A reference row lists the seven proportions in table column order
    (beatty, one per class, one per joint class).  Also flags any reference
    row whose class proportions sum above 1, which no exact count can do.
    """
    notes: list[str] = []
    nlab = len(table.labels)
    for row in table.rows:
        ref = reference_rows.get(row.n)
        if ref is None:
            continue
        vals = table.row_values(row)
        names = (["beatty"] + [f"class:{l}" for l in table.labels]
                 + [f"joint:{l}" for l in table.labels])
        for name, got, want in zip(names, vals, ref):
            if abs(got - want) > tolerance:
                notes.append(
                    f"row {row.n} {name}: computed {got:.4f} vs published "
                    f"{want:.4f} (|diff| > {tolerance})")
        ref_class_sum = sum(ref[1: 1 + nlab])
        if ref_class_sum > 1.0 + 1e-9:
            notes.append(
                f"row {row.n}: published class proportions sum to "
                f"{ref_class_sum:.4f} > 1, impossible for exact counts "
                f"(computed sum {row.class_sum:.4f})")
    return notes


def pnt_ratio(x_grid: Sequence[int], ctx: GaloisContext, class_label: str,
              beatty: BeattyParams, q: Optional[int] = None,
              a: Optional[int] = None, tau: Fraction = Fraction(1),
              config: RunConfig = DEFAULT_CONFIG) -> list[dict]:
    """R(X) = pi_{C,alpha,beta}(X;q,a) / ((1/alpha) pi_C(X;q,a)) per X.

    Each record carries the error envelope q^(d+1) X^(1-kappa) evaluated at
    the declared type tau, with kappa = 10^-d / (125 d tau) for the class's
    fixed-field degree d.
    """
    if q is not None and math.gcd(q, ctx.disc) != 1:
        raise ValidationError("need gcd(q, disc) = 1")
    cls = ctx.get_class(class_label)
    d = cls.degree_fixed_field
    kappa = Fraction(1, 10 ** d) / (125 * d * tau)
    table = joint_count(x_grid, ctx, beatty, q=q, a=a,
                        mode=CountMode.UPTO_X, config=config)
    inv_alpha = 1.0 / beatty.alpha_float()
    out = []
    qq = 1 if q is None else q
    for cp in table.checkpoints:
        n_class = cp.pi_class[class_label]
        n_joint = cp.pi_joint[class_label]
        rec = {
            "x": cp.x,
            "pi_class": n_class,
            "pi_joint": n_joint,
            "ratio": (n_joint / (inv_alpha * n_class)) if n_class else None,
            "envelope": float(qq) ** (d + 1) * float(cp.x) ** float(1 - kappa),
            "kappa": str(kappa),
        }
        out.append(rec)
    return out

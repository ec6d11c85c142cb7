"""Run configuration: precision caps, counting budgets, display knobs.

Every budget has a safe desk-scale default.  Nothing in the library reads
global mutable state; pass a RunConfig explicitly to override a default.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, asdict
from fractions import Fraction

from .errors import ValidationError


def _default_workers() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True)
class RunConfig:
    # precision
    g_max_bits: int = 4096          # hard cap for certified enclosures
    phase_bits: int = 128           # working precision for e(theta*p) phases
    membership_bits: int = 192      # working precision for bulk Beatty tests

    # declared irrationality type used in the explicit-constant formulas;
    # never inferred silently (the true type of pi is unknown)
    tau: Fraction = Fraction(1)
    tau_assumed: bool = True        # True when tau is a working assumption

    # budgets
    max_sieve_span: int = 10 ** 9   # per sieve_range call
    sieve_segment_odds: int = 1 << 21
    max_nth_index: int = 10 ** 8
    max_stream_x: int = 10 ** 9     # streaming joint counts
    max_bv_x: int = 10 ** 7         # exact-mode BV sums
    max_bv_counters: int = 4_000_000
    max_expsum_x: int = 10 ** 8
    max_discrepancy_m: int = 10 ** 7
    max_convergents: int = 10 ** 4
    max_character_modulus: int = 10 ** 5
    max_moment_exponent: int = 30
    max_admissible_size: int = 10 ** 4

    # display / reporting
    bv_display_exponent: float = 2.0     # the A in total*(log x)^A/x
    workers: int = field(default_factory=_default_workers)

    def __post_init__(self) -> None:
        if self.tau < 1:
            raise ValidationError("declared type tau must be >= 1")
        for name in (
            "g_max_bits", "phase_bits", "membership_bits", "max_sieve_span",
            "sieve_segment_odds", "max_nth_index", "max_stream_x", "max_bv_x",
            "max_bv_counters", "max_expsum_x", "max_discrepancy_m",
            "max_convergents", "max_character_modulus", "max_moment_exponent",
            "max_admissible_size", "workers",
        ):
            if getattr(self, name) <= 0:
                raise ValidationError(f"budget {name} must be positive")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["tau"] = str(self.tau)
        return d


DEFAULT_CONFIG = RunConfig()

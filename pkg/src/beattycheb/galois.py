"""Artin-symbol classification via factorization patterns, plus Dirichlet
character machinery.

A context file declares the defining polynomial, the conjugacy-class table
keyed by factorization patterns (valid whenever cycle type separates the
classes, as it does for S_n), the field discriminant, the abelian conductor,
and the fixed-field degree of each class representative.  Classification of
a single prime goes through distinct-degree factorization mod p; bulk
classification of monic cubics takes a vectorized numpy path (one modular
exponentiation x^p mod (f, p) per prime plus a resultant test) that is
cross-checked against the generic route in the tests.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .errors import (
    BudgetExceeded,
    ContextFormatError,
    PatternNotClassified,
    RamifiedPrime,
    ValidationError,
)

RAMIFIED = "ramified"


# -- small arithmetic helpers -------------------------------------------------

def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (inputs here are small)."""
    if n < 0:
        n = -n
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(n: int) -> int:
    out = 1
    for p, e in factorize(n).items():
        out *= (p - 1) * p ** (e - 1)
    return out


def radical(n: int) -> int:
    out = 1
    for p in factorize(n):
        out *= p
    return out


def primitive_root(q: int) -> int:
    """Smallest primitive root mod q (q = p^e or 2p^e, p odd, or 2, 4)."""
    phi = euler_phi(q)
    prime_divs = list(factorize(phi))
    for g in range(2, q):
        if math.gcd(g, q) != 1:
            continue
        if all(pow(g, phi // r, q) != 1 for r in prime_divs):
            return g
    raise ValidationError(f"no primitive root mod {q}")


# -- dense polynomial arithmetic over F_p (little-endian coefficient lists) ---

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymulmod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    return _polyrem(prod, f, p)


def _polyrem(a: list[int], f: list[int], p: int) -> list[int]:
    a = a[:]
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fi in enumerate(f):
            a[shift + i] = (a[shift + i] - coef * fi) % p
        a.pop()
    return _trim(a)


def _polygcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(a[:]), _trim(b[:])
    while b:
        a, b = b, _polyrem(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [c * inv % p for c in a]
    return a


def poly_discriminant(f: Sequence[int]) -> int:
    """disc(f) = (-1)^(d(d-1)/2) Res(f, f') / lc(f), exact over Z."""
    d = len(f) - 1
    fp = [i * f[i] for i in range(1, d + 1)]
    res = _resultant_z(list(f), fp)
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * res // f[-1]


def _resultant_z(a: list[int], b: list[int]) -> int:
    """Integer resultant via the Sylvester matrix and Bareiss elimination."""
    from fractions import Fraction
    da, db = len(a) - 1, len(b) - 1
    n = da + db
    m = [[0] * n for _ in range(n)]
    for i in range(db):
        for j, c in enumerate(reversed(a)):
            m[i][i + j] = c
    for i in range(da):
        for j, c in enumerate(reversed(b)):
            m[db + i][i + j] = c
    # fraction-based determinant is fine at these sizes
    mat = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if mat[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            det = -det
        det *= mat[col][col]
        inv = 1 / mat[col][col]
        for r in range(col + 1, n):
            factor = mat[r][col] * inv
            if factor:
                for c in range(col, n):
                    mat[r][c] -= factor * mat[col][c]
    assert det.denominator == 1
    return int(det)


def factorization_pattern(f: Sequence[int], p: int) -> tuple[int, ...]:
    """Multiset (sorted tuple) of degrees of the irreducible factors of f mod p.

    Distinct-degree splitting: for i = 1, 2, ... the gcd of x^(p^i) - x with
    the unfactored part collects exactly the irreducible factors of degree i.
    Requires p prime and p not dividing disc(f).
    """
    f = list(f)
    if len(f) < 2:
        raise ValidationError("polynomial must be nonconstant")
    if poly_discriminant(f) % p == 0:
        raise RamifiedPrime(f"p = {p} divides disc(f)")
    fp = [c % p for c in f]
    fp = _trim(fp)
    inv = pow(fp[-1], p - 2, p)
    v = [c * inv % p for c in fp]  # monic working copy
    degrees: list[int] = []
    h = [0, 1]  # x
    i = 0
    while len(v) - 1 > 0:
        i += 1
        if 2 * i > len(v) - 1:
            degrees.append(len(v) - 1)
            break
        h = _polypow_xp_step(h, v, p)
        hx = h[:]
        # h - x
        while len(hx) < 2:
            hx.append(0)
        hx[1] = (hx[1] - 1) % p
        g = _polygcd(v, _trim(hx), p)
        if len(g) - 1 > 0:
            deg = len(g) - 1
            degrees.extend([i] * (deg // i))
            v = _polydiv_exact(v, g, p)
            h = _polyrem(h, v, p) if len(v) - 1 > 0 else h
    return tuple(sorted(degrees))


def _polypow_xp_step(h: list[int], v: list[int], p: int) -> list[int]:
    """h^p mod (v, p) by repeated squaring (h is the running x^(p^i))."""
    acc = [1]
    base = h[:]
    exp = p
    while exp:
        if exp & 1:
            acc = _polymulmod(acc, base, v, p)
        exp >>= 1
        if exp:
            base = _polymulmod(base, base, v, p)
    return acc


def _polydiv_exact(a: list[int], b: list[int], p: int) -> list[int]:
    """a / b over F_p assuming exact division, both monic-ish."""
    a = a[:]
    out = [0] * (len(a) - len(b) + 1)
    inv = pow(b[-1], p - 2, p)
    while len(a) >= len(b) and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        coef = a[-1] * inv % p
        shift = len(a) - len(b)
        out[shift] = coef
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * bi) % p
        a.pop()
    return _trim(out)


# -- context ------------------------------------------------------------------

@dataclass(frozen=True)
class ConjugacyClass:
    label: str
    size: int
    degree_fixed_field: int
    patterns: frozenset[tuple[int, ...]]


@dataclass(frozen=True)
class GaloisContext:
    name: str
    poly: tuple[int, ...]          # little-endian, monic
    group_order: int
    disc: int                      # field discriminant
    abelian_conductor: int
    classes: tuple[ConjugacyClass, ...]

    @property
    def ramified(self) -> frozenset[int]:
        return frozenset(factorize(self.disc))

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    def class_labels(self) -> list[str]:
        return [c.label for c in self.classes]

    def get_class(self, label: str) -> ConjugacyClass:
        for c in self.classes:
            if c.label == label:
                return c
        raise ValidationError(f"unknown class {label!r}; "
                              f"have {self.class_labels()}")

    def class_density(self, label: str):
        from fractions import Fraction
        c = self.get_class(label)
        return Fraction(c.size, self.group_order)


_REQUIRED_KEYS = {"schema_version", "name", "polynomial", "group_order",
                  "discriminant", "abelian_conductor", "classes"}
_CLASS_KEYS = {"label", "size", "degree_fixed_field", "patterns"}


def load_context(source: str) -> GaloisContext:
    """Load a context file; `source` is a path or the name of a shipped file."""
    text: Optional[str] = None
    try:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError:
        name = source if source.endswith(".ctx") else source + ".ctx"
        try:
            text = (resources.files("beattycheb.data") / name).read_text()
        except (FileNotFoundError, ModuleNotFoundError) as exc:
            raise ContextFormatError(f"no context file {source!r}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ContextFormatError(f"context is not valid JSON: {exc}") from exc
    return _context_from_doc(doc)


def _context_from_doc(doc: dict) -> GaloisContext:
    if not isinstance(doc, dict):
        raise ContextFormatError("context root must be an object")
    unknown = set(doc) - _REQUIRED_KEYS
    if unknown:
        raise ContextFormatError(f"unknown context keys: {sorted(unknown)}")
    missing = _REQUIRED_KEYS - set(doc)
    if missing:
        raise ContextFormatError(f"missing context keys: {sorted(missing)}")
    if doc["schema_version"] != 1:
        raise ContextFormatError(f"unsupported schema_version {doc['schema_version']}")
    poly = tuple(int(c) for c in doc["polynomial"])
    if len(poly) < 3 or poly[-1] != 1:
        raise ContextFormatError("polynomial must be monic of degree >= 2")
    deg = len(poly) - 1
    classes = []
    seen_patterns: set[tuple[int, ...]] = set()
    for cl in doc["classes"]:
        unknown = set(cl) - _CLASS_KEYS
        if unknown:
            raise ContextFormatError(f"unknown class keys: {sorted(unknown)}")
        pats = []
        for pat in cl["patterns"]:
            t = tuple(sorted(int(d) for d in pat))
            if sum(t) != deg:
                raise ContextFormatError(
                    f"pattern {t} does not sum to deg f = {deg}")
            if t in seen_patterns:
                raise ContextFormatError(
                    f"pattern {t} appears in two classes; cycle type does not "
                    "separate the classes of this context")
            seen_patterns.add(t)
            pats.append(t)
        classes.append(ConjugacyClass(
            label=str(cl["label"]), size=int(cl["size"]),
            degree_fixed_field=int(cl["degree_fixed_field"]),
            patterns=frozenset(pats)))
    ctx = GaloisContext(
        name=str(doc["name"]), poly=poly,
        group_order=int(doc["group_order"]), disc=int(doc["discriminant"]),
        abelian_conductor=int(doc["abelian_conductor"]),
        classes=tuple(classes))
    if sum(c.size for c in ctx.classes) != ctx.group_order:
        raise ContextFormatError("class sizes do not sum to the group order")
    return ctx


def artin_class(p: int, ctx: GaloisContext) -> str:
    """Class label of the Artin symbol at p, or RAMIFIED."""
    if p in ctx.ramified:
        return RAMIFIED
    pat = factorization_pattern(ctx.poly, p)
    for c in ctx.classes:
        if pat in c.patterns:
            return c.label
    raise PatternNotClassified(
        f"pattern {pat} at p = {p} matches no class of context {ctx.name!r}")


# -- bulk classification ------------------------------------------------------

def classify_primes(primes: np.ndarray, ctx: GaloisContext,
                    config: RunConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Class index (position in ctx.classes) per prime; -1 for ramified.

    Monic cubics take the vectorized path; anything else falls back to the
    per-prime generic classifier.
    """
    labels = {c.label: i for i, c in enumerate(ctx.classes)}
    if ctx.degree == 3 and primes.size and int(primes.max()) < (1 << 31):
        return _classify_cubic_batch(primes, ctx, labels)
    out = np.empty(primes.size, dtype=np.int8)
    for i, p in enumerate(primes):
        lab = artin_class(int(p), ctx)
        out[i] = -1 if lab == RAMIFIED else labels[lab]
    return out


def _classify_cubic_batch(primes: np.ndarray, ctx: GaloisContext,
                          labels: dict[str, int]) -> np.ndarray:
    """Vectorized pattern computation for a monic cubic f.

    Computes g = x^p - x mod (f, p) per prime with numpy int64 arithmetic
    (every product is reduced mod p immediately, so nothing overflows for
    p < 2^31), then separates the three possible patterns:
      g == 0                          -> (1,1,1)   full splitting
      det(mult-by-g on F_p[x]/f) == 0 -> (1,2)     exactly one root
      otherwise                       -> (3,)      irreducible
    """
    c0 = ctx.poly[0]
    c1 = ctx.poly[1]
    c2 = ctx.poly[2]
    p = primes.astype(np.int64)
    ram = np.zeros(p.size, dtype=bool)
    for q in sorted(factorize(poly_discriminant(list(ctx.poly)))):
        ram |= (p % q == 0)
    # also field-ramified primes (may differ from disc(f) primes in general)
    for q in sorted(factorize(ctx.disc)):
        ram |= (p % q == 0)

    a0 = np.mod(c0, p)
    a1 = np.mod(c1, p)
    a2 = np.mod(c2, p)
    # reduction multipliers: x^3 = -(a2 x^2 + a1 x + a0)
    # x^4 = (a2^2 - a1) x^2 + (a2 a1 - a0) x + a2 a0
    m42 = (a2 * a2 % p - a1) % p
    m41 = (a2 * a1 % p - a0) % p
    m40 = a2 * a0 % p

    u0 = np.zeros_like(p)
    u1 = np.ones_like(p)
    u2 = np.zeros_like(p)   # u = x

    maxbits = int(primes.max()).bit_length()
    started = np.zeros(p.size, dtype=bool)
    for bit in range(maxbits - 1, -1, -1):
        bits = ((p >> bit) & 1).astype(bool)
        # square u where started
        s0 = u0 * u0 % p
        s1 = 2 * (u0 * u1 % p) % p
        s2 = ((u0 * u2 % p) * 2 + u1 * u1 % p) % p
        s3 = 2 * (u1 * u2 % p) % p
        s4 = u2 * u2 % p
        r0 = (s0 - s3 * a0 % p + s4 * m40 % p) % p
        r1 = (s1 - s3 * a1 % p + s4 * m41 % p) % p
        r2 = (s2 - s3 * a2 % p + s4 * m42 % p) % p
        u0 = np.where(started, r0, u0)
        u1 = np.where(started, r1, u1)
        u2 = np.where(started, r2, u2)
        # multiply by x where this bit is set (and mark started)
        t0 = (-a0 * u2) % p
        t1 = (u0 - a1 * u2 % p) % p
        t2 = (u1 - a2 * u2 % p) % p
        mul = bits & started
        u0 = np.where(mul, t0, u0)
        u1 = np.where(mul, t1, u1)
        u2 = np.where(mul, t2, u2)
        started |= bits

    g0, g1, g2 = u0, (u1 - 1) % p, u2
    is_split = (g0 == 0) & (g1 == 0) & (g2 == 0)

    # multiplication-by-g matrix columns: g, x*g, x^2*g mod (f, p)
    b0 = (-a0 * g2) % p
    b1 = (g0 - a1 * g2 % p) % p
    b2 = (g1 - a2 * g2 % p) % p
    d0 = (-a0 * b2) % p
    d1 = (b0 - a1 * b2 % p) % p
    d2 = (b1 - a2 * b2 % p) % p
    det = (g0 * ((b1 * d2 - b2 * d1) % p) % p
           - b0 * ((g1 * d2 - g2 * d1) % p) % p
           + d0 * ((g1 * b2 - g2 * b1) % p) % p) % p
    has_root = det == 0

    pat_split = tuple(sorted((1, 1, 1)))
    pat_onetwo = tuple(sorted((1, 2)))
    pat_inert = (3,)
    idx = {}
    for want, pat in (("split", pat_split), ("onetwo", pat_onetwo),
                      ("inert", pat_inert)):
        hit = [i for i, c in enumerate(ctx.classes) if pat in c.patterns]
        if len(hit) != 1:
            raise PatternNotClassified(
                f"pattern {pat} matches {len(hit)} classes in {ctx.name!r}")
        idx[want] = hit[0]

    out = np.full(p.size, idx["inert"], dtype=np.int8)
    out[has_root] = idx["onetwo"]
    out[is_split] = idx["split"]
    out[ram] = -1
    return out


# -- Dirichlet characters -----------------------------------------------------

@dataclass(frozen=True)
class _Component:
    modulus: int       # prime power q_i
    order: int         # order of the generator
    generator: int
    logs: tuple[int, ...]   # discrete log table indexed by residue mod q_i


class CharacterGroup:
    """The full group of Dirichlet characters mod q, exponent tables exact."""

    def __init__(self, q: int, config: RunConfig = DEFAULT_CONFIG) -> None:
        if q < 1:
            raise ValidationError("modulus must be >= 1")
        if q > config.max_character_modulus:
            raise BudgetExceeded(
                f"modulus {q} exceeds budget {config.max_character_modulus}")
        self.q = q
        self.components: list[_Component] = []
        for p, e in sorted(factorize(q).items()):
            pe = p ** e
            if p == 2:
                if e == 1:
                    continue
                if e == 2:
                    self.components.append(self._cyclic_component(4, 3, 2))
                else:
                    self.components.extend(self._two_power_components(pe))
            else:
                self.components.append(
                    self._cyclic_component(pe, primitive_root(pe), euler_phi(pe)))
        self.exponent = 1
        for c in self.components:
            self.exponent = self.exponent * c.order // math.gcd(
                self.exponent, c.order)

    @staticmethod
    def _cyclic_component(pe: int, g: int, order: int) -> _Component:
        logs = [-1] * pe
        x = 1
        for k in range(order):
            logs[x] = k
            x = x * g % pe
        return _Component(pe, order, g % pe, tuple(logs))

    @staticmethod
    def _two_power_components(pe: int) -> list[_Component]:
        """(Z/2^e)* = <-1> x <5> for e >= 3; both log tables are total on units."""
        half_order = pe // 4
        sign_logs = [-1] * pe
        five_logs = [-1] * pe
        x = 1
        for t in range(half_order):
            sign_logs[x] = 0
            five_logs[x] = t
            sign_logs[pe - x] = 1
            five_logs[pe - x] = t
            x = x * 5 % pe
        return [_Component(pe, 2, pe - 1, tuple(sign_logs)),
                _Component(pe, half_order, 5, tuple(five_logs))]

    def _component_logs(self, a: int) -> Optional[list[int]]:
        """Per-component discrete logs of a, or None if gcd(a, q) > 1."""
        if math.gcd(a, self.q) != 1:
            return None
        return [comp.logs[a % comp.modulus] for comp in self.components]

    @property
    def size(self) -> int:
        n = 1
        for c in self.components:
            n *= c.order
        return n

    def characters(self) -> list["DirichletCharacter"]:
        """All phi(q) characters, principal first, deterministic order."""
        out: list[DirichletCharacter] = []
        ks = [0] * len(self.components)
        while True:
            out.append(DirichletCharacter(self, tuple(ks)))
            for i in range(len(ks) - 1, -1, -1):
                ks[i] += 1
                if ks[i] < self.components[i].order:
                    break
                ks[i] = 0
            else:
                break
        return out


class DirichletCharacter:
    """chi(a) = zeta_E^t(a) stored as the exact exponent map t."""

    def __init__(self, group: CharacterGroup, exps: tuple[int, ...]) -> None:
        self.group = group
        self.exps = exps

    @property
    def modulus(self) -> int:
        return self.group.q

    @property
    def is_principal(self) -> bool:
        return all(k == 0 for k in self.exps)

    @property
    def order(self) -> int:
        o = 1
        for k, comp in zip(self.exps, self.group.components):
            ok = comp.order // math.gcd(comp.order, k)
            o = o * ok // math.gcd(o, ok)
        return o

    def exponent_of(self, a: int) -> Optional[int]:
        """t with chi(a) = exp(2 pi i t / E), E the group exponent; None if
        gcd(a, q) > 1."""
        logs = self.group._component_logs(a % self.group.q)
        if logs is None:
            return None
        e = self.group.exponent
        t = 0
        for k, l, comp in zip(self.exps, logs, self.group.components):
            t = (t + k * l * (e // comp.order)) % e
        return t

    def value(self, a: int) -> complex:
        t = self.exponent_of(a)
        if t is None:
            return 0j
        e = self.group.exponent
        ang = 2.0 * math.pi * t / e
        return complex(math.cos(ang), math.sin(ang))

    def value_table(self) -> np.ndarray:
        """chi(a) for a = 0..q-1 as a complex array (0 on non-units)."""
        q = self.group.q
        out = np.zeros(q, dtype=np.complex128)
        for a in range(q):
            out[a] = self.value(a)
        return out


def character_group(q: int,
                    config: RunConfig = DEFAULT_CONFIG) -> list[DirichletCharacter]:
    """All phi(q) Dirichlet characters mod q, principal character first."""
    return CharacterGroup(q, config).characters()

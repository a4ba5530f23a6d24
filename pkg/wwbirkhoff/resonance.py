"""
Resonance Analysis
==================

Cubic and quartic frequency resonances of ω(k) = √|k| under momentum
conservation.

A signed tuple ((σ_1, n_1), ..., (σ_p, n_p)) is resonant when its phase
Σ σ_i √|n_i| vanishes and its momentum Σ σ_i n_i is zero. Zero phases are
decided in integer arithmetic only; floating point is used solely to screen
out tuples whose phase is far from zero.

Quartic resonances fall into two known families:

    Trivial:        frequencies pair up with opposite signs
                    (u_a ū_a u_b ū_b, u_k ū_{-k} u_{-k} ū_k, ...)
    Benjamin-Feir:  n1 = -λb², n2 = λ(b+1)², n3 = λ(b²+b+1)², n4 = λ(b+1)²b²
                    with signs (+, -, +, -)

Anything else is reported as Other.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, localcontext
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, TextIO, Tuple

import numpy as np

from .constants import CUBIC_PHASE_BOUND, MINUS, PLUS, TOLERANCES

logger = logging.getLogger(__name__)

__all__ = [
    "ResonanceError",
    "SignedTuple",
    "ResonanceKind",
    "ResonanceClass",
    "phase",
    "is_exact_zero",
    "benjamin_feir",
    "match_benjamin_feir",
    "classify",
    "enumerate_quartic",
    "resonant_monomial_support",
    "min_cubic_phase",
    "cubic_minimizer",
    "SmallDivisorRow",
    "SmallDivisorTable",
    "small_divisor_scan",
    "write_enumeration_csv",
    "write_small_divisor_csv",
]


class ResonanceError(ValueError):
    """Invalid signed tuple or scan parameters."""
    pass


# =============================================================================
# SIGNED TUPLES
# =============================================================================

@dataclass(frozen=True)
class SignedTuple:
    """
    Signed modes (σ_i, n_i) with σ_i in {+1, -1} and n_i != 0.

    Attributes:
        signs: σ_1..σ_p
        modes: n_1..n_p
    """
    signs: Tuple[int, ...]
    modes: Tuple[int, ...]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        modes = tuple(int(n) for n in self.modes)
        if len(signs) != len(modes) or not signs:
            raise ResonanceError("signs and modes must be non-empty and of equal length")
        if any(s not in (PLUS, MINUS) for s in signs):
            raise ResonanceError(f"signs must be +1/-1, got {signs}")
        if any(n == 0 for n in modes):
            raise ResonanceError("mode 0 is excluded")
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "modes", modes)

    @classmethod
    def of(cls, pairs: Iterable[Tuple[int, int]]) -> "SignedTuple":
        """Build from (sign, mode) pairs."""
        pairs = list(pairs)
        return cls(tuple(s for s, _ in pairs), tuple(n for _, n in pairs))

    @property
    def degree(self) -> int:
        return len(self.modes)

    @property
    def momentum(self) -> int:
        return sum(s * n for s, n in zip(self.signs, self.modes))

    @property
    def phase(self) -> float:
        return phase(self)

    def plus_modes(self) -> Tuple[int, ...]:
        return tuple(sorted(n for s, n in zip(self.signs, self.modes) if s == PLUS))

    def minus_modes(self) -> Tuple[int, ...]:
        return tuple(sorted(n for s, n in zip(self.signs, self.modes) if s == MINUS))

    def conjugate(self) -> "SignedTuple":
        """Global conjugation: every sign flips."""
        return SignedTuple(tuple(-s for s in self.signs), self.modes)

    def mirror(self) -> "SignedTuple":
        """Reflection x -> -x: every mode changes sign."""
        return SignedTuple(self.signs, tuple(-n for n in self.modes))

    def canonical(self) -> "SignedTuple":
        """
        Representative modulo permutations of equal-sign slots and global
        conjugation. Slots are interleaved (+, -, +, -, ...), + first.
        """
        rep = (self.plus_modes(), self.minus_modes())
        alt = (rep[1], rep[0])
        plus, minus = min(rep, alt, key=lambda r: (-len(r[0]), r))
        pairs: List[Tuple[int, int]] = []
        for i in range(max(len(plus), len(minus))):
            if i < len(plus):
                pairs.append((PLUS, plus[i]))
            if i < len(minus):
                pairs.append((MINUS, minus[i]))
        return SignedTuple.of(pairs)

    def factors(self) -> Tuple[Tuple[int, int], ...]:
        """Sorted (mode, sign) multiset, the key of the matching monomial."""
        return tuple(sorted(zip(self.modes, self.signs)))

    def to_row(self) -> List[str]:
        row: List[str] = []
        for s, n in zip(self.signs, self.modes):
            row.extend(["+" if s == PLUS else "-", str(n)])
        return row

    def __str__(self) -> str:
        body = ", ".join(f"{'+' if s == PLUS else '-'}{n}" for s, n in zip(self.signs, self.modes))
        return f"({body})"


class ResonanceKind(Enum):
    TRIVIAL = "Trivial"
    BENJAMIN_FEIR = "BenjaminFeir"
    OTHER = "Other"


@dataclass(frozen=True)
class ResonanceClass:
    """Classification of a resonant tuple; λ and b only for Benjamin-Feir."""
    kind: ResonanceKind
    lam: Optional[int] = None
    b: Optional[int] = None

    def to_row(self) -> List[str]:
        return [
            self.kind.value,
            "" if self.lam is None else str(self.lam),
            "" if self.b is None else str(self.b),
        ]


# =============================================================================
# EXACT ARITHMETIC
# =============================================================================

def phase(t: SignedTuple) -> float:
    """Floating value of Σ σ_i √|n_i|."""
    return float(sum(s * math.sqrt(abs(n)) for s, n in zip(t.signs, t.modes)))


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def _squarefree_split(n: int) -> Tuple[int, int]:
    """n = c² r with r squarefree."""
    c, r = 1, n
    p = 2
    while p * p <= r:
        while r % (p * p) == 0:
            r //= p * p
            c *= p
        p += 1
    return c, r


def _radicals_vanish(plus: Sequence[int], minus: Sequence[int]) -> bool:
    # √r for distinct squarefree r are linearly independent over Q
    totals: Dict[int, int] = {}
    for sign, group in ((1, plus), (-1, minus)):
        for n in group:
            c, r = _squarefree_split(n)
            totals[r] = totals.get(r, 0) + sign * c
    return all(v == 0 for v in totals.values())


def _sqrt_sums_equal(left: Sequence[int], right: Sequence[int]) -> bool:
    """Σ√left == Σ√right exactly, for positive integers."""
    if not left or not right:
        return not left and not right
    if len(left) > len(right):
        left, right = right, left
    if len(left) == 1 and len(right) == 1:
        return left[0] == right[0]
    if len(left) == 1 and len(right) == 2:
        # √x = √y + √z  <=>  x - y - z = 2√(yz) >= 0
        x, (y, z) = left[0], right
        r = x - y - z
        return r >= 0 and r * r == 4 * y * z
    if len(left) == 2 and len(right) == 2:
        # √a + √c = √b + √d  <=>  √(4ac) - √(4bd) = b + d - a - c
        (a, c), (b, d) = left, right
        e = b + d - a - c
        p, q = 4 * a * c, 4 * b * d
        if e == 0:
            return p == q
        if not _is_square(q):
            return False
        t = e + math.isqrt(q)
        return t >= 0 and t * t == p
    return _radicals_vanish(left, right)


def is_exact_zero(t: SignedTuple) -> bool:
    """True iff Σ σ_i √|n_i| = 0, decided in integer arithmetic."""
    plus = [abs(n) for s, n in zip(t.signs, t.modes) if s == PLUS]
    minus = [abs(n) for s, n in zip(t.signs, t.modes) if s == MINUS]
    return _sqrt_sums_equal(plus, minus)


def _precise_abs_phase(t: SignedTuple) -> float:
    with localcontext() as ctx:
        ctx.prec = 50
        total = sum((Decimal(s) * Decimal(abs(n)).sqrt() for s, n in zip(t.signs, t.modes)), Decimal(0))
        return float(abs(total))


# =============================================================================
# CLASSIFICATION
# =============================================================================

def _bf_modes(lam: int, b: int) -> Tuple[int, int, int, int]:
    return (-lam * b * b, lam * (b + 1) ** 2, lam * (b * b + b + 1) ** 2, lam * (b + 1) ** 2 * b * b)


def benjamin_feir(lam: int, b: int) -> SignedTuple:
    """
    Benjamin-Feir resonance BF(λ, b) with signs (+, -, +, -).

    Raises:
        ResonanceError: If λ = 0 or b < 1
    """
    if lam == 0 or b < 1:
        raise ResonanceError(f"BF family needs λ != 0 and b >= 1, got λ={lam}, b={b}")
    t = SignedTuple((PLUS, MINUS, PLUS, MINUS), _bf_modes(lam, b))
    if t.momentum != 0 or not is_exact_zero(t):
        raise ResonanceError(f"BF({lam}, {b}) failed the resonance identities")
    return t


def match_benjamin_feir(t: SignedTuple) -> Optional[Tuple[int, int]]:
    """(λ, b) such that t equals BF(λ, b) up to slot permutation and conjugation."""
    if t.degree != 4:
        return None
    plus, minus = t.plus_modes(), t.minus_modes()
    if len(plus) != 2:
        return None
    for p, m in ((plus, minus), (minus, plus)):
        for x, y in ((p[0], p[1]), (p[1], p[0])):
            for b in range(1, math.isqrt(abs(x)) + 1):
                if x % (b * b):
                    continue
                lam = -x // (b * b)
                n1, n2, n3, n4 = _bf_modes(lam, b)
                if n3 == y and tuple(sorted((n2, n4))) == m:
                    return lam, b
    return None


def classify(t: SignedTuple) -> ResonanceClass:
    """Classify a resonant tuple as Trivial, Benjamin-Feir or Other."""
    plus = sorted(abs(n) for n in t.plus_modes())
    minus = sorted(abs(n) for n in t.minus_modes())
    if plus == minus:
        return ResonanceClass(ResonanceKind.TRIVIAL)
    match = match_benjamin_feir(t)
    if match is not None:
        return ResonanceClass(ResonanceKind.BENJAMIN_FEIR, lam=match[0], b=match[1])
    return ResonanceClass(ResonanceKind.OTHER)


# =============================================================================
# SCANS
# =============================================================================

# sign patterns up to global conjugation
_CUBIC_PATTERNS = ((PLUS, PLUS, PLUS), (PLUS, PLUS, MINUS))
_QUARTIC_PATTERNS = (
    (PLUS, PLUS, PLUS, PLUS),
    (PLUS, PLUS, PLUS, MINUS),
    (PLUS, PLUS, MINUS, MINUS),
)


def _nonzero_range(N: int) -> np.ndarray:
    return np.concatenate((np.arange(-N, 0), np.arange(1, N + 1)))


def _map_stripes(fn: Callable, stripes: Sequence, workers: int) -> List:
    if workers <= 1:
        return [fn(s) for s in stripes]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, stripes))


def _quartic_stripe(N: int, pattern: Tuple[int, ...], n1: int):
    """Grids n2, n3 for fixed n1; n4 solved from momentum."""
    s1, s2, s3, s4 = pattern
    rng = _nonzero_range(N)
    n2, n3 = np.meshgrid(rng, rng, indexing="ij")
    n4 = -s4 * (s1 * n1 + s2 * n2 + s3 * n3)
    valid = (n4 != 0) & (np.abs(n4) <= N)
    root = lambda a: np.sqrt(np.abs(a).astype(float))
    ph = s1 * math.sqrt(abs(n1)) + s2 * root(n2) + s3 * root(n3) + s4 * root(n4)
    return n2, n3, n4, valid, ph


def enumerate_quartic(N: int, workers: int = 1) -> List[Tuple[SignedTuple, ResonanceClass]]:
    """
    All resonant momentum-conserving quartic tuples with max|n_i| <= N.

    Tuples are deduplicated up to permutation within equal-sign slots and
    global conjugation, then classified.
    """
    if N < 1:
        raise ResonanceError(f"N must be >= 1, got {N}")
    screen = TOLERANCES["exact_screen"]

    def stripe(n1: int) -> Set[SignedTuple]:
        found: Set[SignedTuple] = set()
        for pattern in _QUARTIC_PATTERNS:
            n2, n3, n4, valid, ph = _quartic_stripe(N, pattern, n1)
            for i, j in zip(*np.nonzero(valid & (np.abs(ph) < screen))):
                t = SignedTuple(pattern, (n1, int(n2[i, j]), int(n3[i, j]), int(n4[i, j])))
                if is_exact_zero(t):
                    found.add(t.canonical())
        return found

    merged: Set[SignedTuple] = set()
    for part in _map_stripes(stripe, [int(n) for n in _nonzero_range(N)], workers):
        merged |= part

    result = sorted(((t, classify(t)) for t in merged), key=lambda tc: (tc[0].signs, tc[0].modes))
    counts: Dict[str, int] = {}
    for _, c in result:
        counts[c.kind.value] = counts.get(c.kind.value, 0) + 1
    logger.info("quartic resonances with max|n| <= %d: %s", N, counts)
    return result


def resonant_monomial_support(M: int, workers: int = 1) -> List[Tuple[Tuple[int, int], ...]]:
    """
    Every resonant quartic monomial in modes |k| <= M, as sorted (k, σ)
    multisets. Both members of each conjugate pair are listed.
    """
    keys: Set[Tuple[Tuple[int, int], ...]] = set()
    for t, _ in enumerate_quartic(M, workers):
        keys.add(t.factors())
        keys.add(t.conjugate().factors())
    return sorted(keys)


def _cubic_scan(N: int) -> Tuple[float, SignedTuple]:
    if N < 1:
        raise ResonanceError(f"N must be >= 1, got {N}")
    best = math.inf
    best_tuple: Optional[SignedTuple] = None
    rng = _nonzero_range(N)
    for pattern in _CUBIC_PATTERNS:
        s1, s2, s3 = pattern
        for n1 in rng:
            n1 = int(n1)
            n3 = -s3 * (s1 * n1 + s2 * rng)
            valid = (n3 != 0) & (np.abs(n3) <= N)
            if not np.any(valid):
                continue
            ph = np.abs(
                s1 * math.sqrt(abs(n1))
                + s2 * np.sqrt(np.abs(rng).astype(float))
                + s3 * np.sqrt(np.abs(n3).astype(float))
            )
            ph = np.where(valid, ph, np.inf)
            i = int(np.argmin(ph))
            if ph[i] < best:
                best = float(ph[i])
                best_tuple = SignedTuple(pattern, (n1, int(rng[i]), int(n3[i])))
    if best_tuple is None:
        raise ResonanceError(f"no momentum-conserving cubic tuple with max|n| <= {N}")
    return best, best_tuple.canonical()


def min_cubic_phase(N: int) -> float:
    """Smallest |phase| over momentum-conserving cubic tuples with max|n_i| <= N."""
    value, _ = _cubic_scan(N)
    if value < CUBIC_PHASE_BOUND - 1e-12:
        raise ResonanceError(f"cubic phase {value} below the lower bound {CUBIC_PHASE_BOUND}")
    return value


def cubic_minimizer(N: int) -> Tuple[float, SignedTuple]:
    """The smallest cubic |phase| and a tuple attaining it."""
    return _cubic_scan(N)


@dataclass(frozen=True)
class SmallDivisorRow:
    max_bucket: int
    min_abs_phase: float
    count_tuples: int

    def to_row(self) -> List[str]:
        return [str(self.max_bucket), repr(self.min_abs_phase), str(self.count_tuples)]


@dataclass(frozen=True)
class SmallDivisorTable:
    """
    Per-bucket minima of |phase| over non-resonant quartic tuples.

    exponent and constant describe the envelope |phase| >= c max^{-N0}:
    N0 is the least-squares slope of log(min) against log(max) and c the
    largest constant for which every row satisfies the bound.
    """
    rows: Tuple[SmallDivisorRow, ...]
    exponent: float
    constant: float
    N: int = 0


def small_divisor_scan(N: int, bucket_width: int = 1, workers: int = 1) -> SmallDivisorTable:
    """
    Scan every momentum-0, non-resonant quartic tuple with max|n_i| <= N.

    Counts are ordered slot assignments per sign pattern, patterns taken up
    to global conjugation. Tuples whose floating phase falls inside the
    screening window are decided exactly; survivors get a 50-digit phase.
    """
    if N < 4:
        raise ResonanceError(f"small divisor scan needs N >= 4, got {N}")
    if bucket_width < 1:
        raise ResonanceError(f"bucket_width must be >= 1, got {bucket_width}")
    screen = TOLERANCES["exact_screen"]
    n_buckets = -(-N // bucket_width)

    def stripe(n1: int):
        mins = np.full(n_buckets, np.inf)
        counts = np.zeros(n_buckets, dtype=np.int64)
        for pattern in _QUARTIC_PATTERNS:
            n2, n3, n4, valid, ph = _quartic_stripe(N, pattern, n1)
            absph = np.abs(ph)
            keep = valid.copy()
            for i, j in zip(*np.nonzero(valid & (absph < screen))):
                t = SignedTuple(pattern, (n1, int(n2[i, j]), int(n3[i, j]), int(n4[i, j])))
                if is_exact_zero(t):
                    keep[i, j] = False
                else:
                    absph[i, j] = _precise_abs_phase(t)
            top = np.maximum(np.maximum(abs(n1), np.abs(n2)), np.maximum(np.abs(n3), np.abs(n4)))
            bucket = (top[keep] - 1) // bucket_width
            np.minimum.at(mins, bucket, absph[keep])
            np.add.at(counts, bucket, 1)
        return mins, counts

    mins = np.full(n_buckets, np.inf)
    counts = np.zeros(n_buckets, dtype=np.int64)
    for part_min, part_count in _map_stripes(stripe, [int(n) for n in _nonzero_range(N)], workers):
        mins = np.minimum(mins, part_min)
        counts += part_count

    rows = tuple(
        SmallDivisorRow((b + 1) * bucket_width, float(mins[b]), int(counts[b]))
        for b in range(n_buckets)
        if counts[b] > 0
    )
    fit = [r for r in rows if r.max_bucket >= 2]
    x = np.log([r.max_bucket for r in fit])
    y = np.log([r.min_abs_phase for r in fit])
    slope, _ = np.polyfit(x, y, 1)
    exponent = float(-slope)
    constant = float(np.min(np.exp(y + exponent * x)))
    logger.info("small divisors up to N=%d: N0 ~ %.3f, c ~ %.3e", N, exponent, constant)
    return SmallDivisorTable(rows=rows, exponent=exponent, constant=constant, N=N)


# =============================================================================
# CSV OUTPUT
# =============================================================================

ENUMERATION_COLUMNS = ("s1", "n1", "s2", "n2", "s3", "n3", "s4", "n4", "class", "lambda", "b")
SMALL_DIVISOR_COLUMNS = ("max_bucket", "min_abs_phase", "count_tuples")


def write_enumeration_csv(
    stream: TextIO,
    entries: Iterable[Tuple[SignedTuple, ResonanceClass]],
    header: Optional[str] = None,
) -> int:
    """Write enumerate_quartic output; returns the number of rows."""
    if header:
        stream.write(f"# {header}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(ENUMERATION_COLUMNS)
    count = 0
    for t, c in entries:
        writer.writerow(t.to_row() + c.to_row())
        count += 1
    return count


def write_small_divisor_csv(stream: TextIO, table: SmallDivisorTable, header: Optional[str] = None) -> int:
    """Write the per-bucket rows; N0 and c go into a trailing comment."""
    if header:
        stream.write(f"# {header}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SMALL_DIVISOR_COLUMNS)
    for row in table.rows:
        writer.writerow(row.to_row())
    stream.write(f"# N={table.N} exponent={table.exponent!r} constant={table.constant!r}\n")
    return len(table.rows)

"""
Resonance Tests
---------------
Tests for exact zero-phase decisions, classification, enumeration and the
small-divisor scan.
"""

import decimal
import io
import itertools
import math

import numpy as np
import pytest

from wwbirkhoff.birkhoff import bf_tuples_within
from wwbirkhoff.constants import CUBIC_PHASE_BOUND, MINUS, PLUS
from wwbirkhoff.resonance import (
    ENUMERATION_COLUMNS,
    ResonanceError,
    ResonanceKind,
    SignedTuple,
    _precise_abs_phase,
    benjamin_feir,
    classify,
    cubic_minimizer,
    enumerate_quartic,
    is_exact_zero,
    min_cubic_phase,
    phase,
    resonant_monomial_support,
    small_divisor_scan,
    write_enumeration_csv,
    write_small_divisor_csv,
)

ALTERNATING = (PLUS, MINUS, PLUS, MINUS)
QUARTIC_PATTERNS = ((PLUS, PLUS, PLUS, PLUS), (PLUS, PLUS, PLUS, MINUS), (PLUS, PLUS, MINUS, MINUS))


def _near_zero_tuples(N, window):
    """Momentum-0 quartic tuples with max|n| <= N and |phase| < window."""
    rng = np.concatenate((np.arange(-N, 0), np.arange(1, N + 1)))
    n2, n3 = np.meshgrid(rng, rng, indexing="ij")
    root = lambda a: np.sqrt(np.abs(a).astype(float))
    for s1, s2, s3, s4 in QUARTIC_PATTERNS:
        for n1 in rng:
            n4 = -s4 * (s1 * n1 + s2 * n2 + s3 * n3)
            ph = s1 * math.sqrt(abs(n1)) + s2 * root(n2) + s3 * root(n3) + s4 * root(n4)
            hits = (n4 != 0) & (np.abs(n4) <= N) & (np.abs(ph) < window)
            for i, j in zip(*np.nonzero(hits)):
                yield SignedTuple((s1, s2, s3, s4), (int(n1), int(n2[i, j]), int(n3[i, j]), int(n4[i, j])))


class TestSignedTuple:
    """Tests for signed tuples."""

    def test_zero_mode(self):
        """Mode 0 is excluded."""
        with pytest.raises((ValueError, ResonanceError)):
            SignedTuple((PLUS, MINUS), (0, 1))

    def test_length_mismatch(self):
        """Signs and modes must pair up."""
        with pytest.raises((ValueError, ResonanceError)):
            SignedTuple((PLUS,), (1, 2))

    def test_canonical_is_conjugation_invariant(self):
        """A tuple and its conjugate share a representative."""
        t = SignedTuple(ALTERNATING, (-1, 4, 9, 4))
        assert t.canonical() == t.conjugate().canonical()

    def test_mirror(self):
        """Mirroring negates every mode."""
        assert SignedTuple((PLUS, MINUS), (1, 2)).mirror().modes == (-1, -2)


class TestExactZero:
    """Tests for integer zero-phase decisions."""

    def test_trivial(self):
        """√1 - √1 + √2 - √2 = 0."""
        assert is_exact_zero(SignedTuple(ALTERNATING, (1, 1, 2, 2)))

    def test_benjamin_feir(self):
        """1 - 2 + 3 - 2 = 0."""
        assert is_exact_zero(SignedTuple(ALTERNATING, (-1, 4, 9, 4)))

    def test_near_miss(self):
        """√2 + √8 = √18 but √2 + √8 != √17."""
        assert is_exact_zero(SignedTuple((PLUS, PLUS, MINUS), (2, 8, 18)))
        assert not is_exact_zero(SignedTuple((PLUS, PLUS, MINUS), (2, 8, 17)))

    def test_cubic_never_zero(self):
        """√1 + √1 - √2 != 0."""
        assert not is_exact_zero(SignedTuple((PLUS, PLUS, MINUS), (1, 1, 2)))

    def test_agrees_with_float_phase(self):
        """Up to max|n| = 60 the exact test equals |phase| < 1e-9.

        Tuples outside the 1e-3 window are zero for neither test.
        """
        checked = 0
        for t in _near_zero_tuples(60, 1e-3):
            assert t.momentum == 0
            assert is_exact_zero(t) == (abs(phase(t)) < 1e-9), str(t)
            checked += 1
        assert checked > 0

    def test_precise_phase_keeps_decimal_context(self):
        """The 50-digit phase leaves the global decimal precision alone."""
        before = decimal.getcontext().prec
        value = _precise_abs_phase(SignedTuple(ALTERNATING, (1, 2, 3, 2)))
        assert decimal.getcontext().prec == before
        assert value == pytest.approx(abs(1 - 2 * math.sqrt(2) + math.sqrt(3)), abs=1e-15)


class TestClassification:
    """Tests for Trivial / Benjamin-Feir / Other."""

    def test_bf_constructor(self):
        """BF(1, 1) = (-1, 4, 9, 4) with alternating signs."""
        t = benjamin_feir(1, 1)
        assert t.modes == (-1, 4, 9, 4)
        assert t.momentum == 0

    def test_bf_rejects_bad_parameters(self):
        """λ = 0 or b < 1 is not a BF tuple."""
        with pytest.raises((ValueError, ResonanceError)):
            benjamin_feir(0, 1)
        with pytest.raises((ValueError, ResonanceError)):
            benjamin_feir(1, 0)

    def test_classify_bf(self):
        """BF tuples are recognised with their parameters."""
        c = classify(benjamin_feir(-2, 1))
        assert c.kind == ResonanceKind.BENJAMIN_FEIR
        assert (c.lam, c.b) == (-2, 1)

    def test_classify_bf_b2(self):
        """BF(1, 2) = (-4, 9, 49, 36)."""
        c = classify(benjamin_feir(1, 2))
        assert (c.kind, c.lam, c.b) == (ResonanceKind.BENJAMIN_FEIR, 1, 2)

    @pytest.mark.parametrize("lam", [-5, -4, -3, -2, -1, 1, 2, 3, 4, 5])
    @pytest.mark.parametrize("b", [1, 2, 3, 4, 5])
    def test_bf_family(self, lam, b):
        """Every BF(λ, b) conserves momentum, resonates exactly and is recognised."""
        t = benjamin_feir(lam, b)
        assert t.momentum == 0
        assert is_exact_zero(t)
        c = classify(t)
        assert (c.kind, c.lam, c.b) == (ResonanceKind.BENJAMIN_FEIR, lam, b)

    def test_classify_trivial(self):
        """Equal |modes| on both sides is Trivial."""
        t = SignedTuple(ALTERNATING, (3, -3, -3, 3))
        assert classify(t).kind == ResonanceKind.TRIVIAL

    def test_classify_other(self):
        """Anything else is Other."""
        assert classify(SignedTuple(ALTERNATING, (1, 2, 3, 2))).kind == ResonanceKind.OTHER


class TestEnumeration:
    """Tests for the quartic enumeration."""

    def test_no_other_class(self):
        """Every resonance with max|n| <= 10 is Trivial or Benjamin-Feir."""
        entries = enumerate_quartic(10)
        assert entries
        assert all(c.kind != ResonanceKind.OTHER for _, c in entries)

    def test_bf_present(self):
        """BF(±1, 1) appear at N = 10 and nothing else of that family."""
        entries = enumerate_quartic(10)
        found = {(c.lam, c.b) for _, c in entries if c.kind == ResonanceKind.BENJAMIN_FEIR}
        assert found == {(1, 1), (-1, 1)}
        tuples = {t for t, _ in entries}
        assert benjamin_feir(1, 1).canonical() in tuples

    def test_every_entry_resonant(self):
        """Enumerated tuples have zero momentum and zero phase."""
        for t, _ in enumerate_quartic(6):
            assert t.momentum == 0
            assert is_exact_zero(t)

    def test_threads_agree(self):
        """Stripe parallelism does not change the result."""
        assert enumerate_quartic(6, workers=3) == enumerate_quartic(6)

    def test_bad_bound(self):
        """N must be positive."""
        with pytest.raises((ValueError, ResonanceError)):
            enumerate_quartic(0)

    def test_support_contains_actions(self):
        """|u1|²|u2|² is part of the resonant support."""
        support = resonant_monomial_support(3)
        assert ((1, MINUS), (1, PLUS), (2, MINUS), (2, PLUS)) in support

    def test_closed_under_symmetries(self):
        """Slot permutations, conjugation and mirroring map resonances to resonances."""
        entries = enumerate_quartic(8)
        found = {t for t, _ in entries}
        for t in found:
            for order in itertools.permutations(range(4)):
                moved = SignedTuple(tuple(t.signs[i] for i in order), tuple(t.modes[i] for i in order))
                assert moved.canonical() in found
                assert moved.conjugate().canonical() in found
                assert moved.mirror().canonical() in found

    @pytest.mark.slow
    def test_classes_large(self):
        """Up to N = 100: no Other class and exactly the BF tuples that fit."""
        entries = enumerate_quartic(100, workers=4)
        assert all(c.kind != ResonanceKind.OTHER for _, c in entries)
        found = {(c.lam, c.b) for _, c in entries if c.kind == ResonanceKind.BENJAMIN_FEIR}
        assert found == set(bf_tuples_within(100))


class TestCubic:
    """Tests for the cubic phase bound."""

    def test_minimum(self):
        """The smallest cubic |phase| is 2 - √2."""
        assert min_cubic_phase(2) == pytest.approx(2.0 - math.sqrt(2.0), abs=1e-15)
        assert min_cubic_phase(30) == pytest.approx(CUBIC_PHASE_BOUND, abs=1e-15)

    def test_minimizer(self):
        """The minimum is attained at (1, 1, 2)."""
        _, t = cubic_minimizer(8)
        assert sorted(abs(n) for n in t.modes) == [1, 1, 2]
        assert t.momentum == 0

    def test_no_tuple(self):
        """N = 1 admits no momentum-conserving cubic tuple."""
        with pytest.raises((ValueError, ResonanceError)):
            min_cubic_phase(1)

    def test_non_increasing(self):
        """Larger boxes never raise the minimum."""
        values = [min_cubic_phase(N) for N in range(2, 41)]
        assert all(b <= a for a, b in zip(values, values[1:]))
        assert min(values) >= CUBIC_PHASE_BOUND - 1e-12

    def test_bound_large_box(self):
        """The bound holds over max|n| <= 500."""
        assert min_cubic_phase(500) >= CUBIC_PHASE_BOUND - 1e-12


class TestSmallDivisors:
    """Tests for the small-divisor scan."""

    @pytest.fixture
    def table(self):
        """Scan up to N = 10."""
        return small_divisor_scan(10)

    def test_rows_positive(self, table):
        """Non-resonant phases are strictly positive."""
        assert table.rows
        assert all(r.min_abs_phase > 0 and r.count_tuples > 0 for r in table.rows)

    def test_envelope(self, table):
        """Every fitted row lies above c max^{-N0}."""
        for r in table.rows:
            if r.max_bucket >= 2:
                assert r.min_abs_phase >= table.constant * r.max_bucket ** -table.exponent * (1 - 1e-12)

    def test_bucket_width(self):
        """Wider buckets give fewer rows."""
        assert len(small_divisor_scan(8, bucket_width=2).rows) <= 4

    def test_bad_arguments(self):
        """N >= 4 and bucket_width >= 1 are required."""
        with pytest.raises((ValueError, ResonanceError)):
            small_divisor_scan(3)
        with pytest.raises((ValueError, ResonanceError)):
            small_divisor_scan(8, bucket_width=0)

    @pytest.mark.slow
    def test_large_scan(self):
        """Over max|n| <= 200 every minimum is positive and N0 is finite and at most 4."""
        table = small_divisor_scan(200, workers=4)
        assert all(r.min_abs_phase > 0 for r in table.rows)
        assert math.isfinite(table.exponent)
        assert table.exponent <= 4.0


class TestCsv:
    """Tests for the CSV writers."""

    def test_enumeration_csv(self):
        """Header comment, column line, one row per tuple."""
        entries = enumerate_quartic(4)
        buf = io.StringIO()
        count = write_enumeration_csv(buf, entries, header="run")
        lines = buf.getvalue().splitlines()
        assert lines[0] == "# run"
        assert lines[1] == ",".join(ENUMERATION_COLUMNS)
        assert count == len(entries) == len(lines) - 2

    def test_small_divisor_csv(self):
        """The envelope is written as a trailing comment."""
        table = small_divisor_scan(6)
        buf = io.StringIO()
        write_small_divisor_csv(buf, table)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "max_bucket,min_abs_phase,count_tuples"
        assert lines[-1].startswith("# N=6 exponent=")

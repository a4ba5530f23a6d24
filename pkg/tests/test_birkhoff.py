"""
Birkhoff Normal Form Tests
--------------------------
Tests for the normal form, its closed form, the null condition and the
action-frequency map.
"""

import json
import math

import numpy as np
import pytest

from wwbirkhoff.birkhoff import (
    REPORT_SCHEMA,
    ActionFrequencyMap,
    NormalFormError,
    action_form_hzd4,
    bf_tuples_within,
    compute_normal_form,
    explicit_hzd4,
    transport_split,
    verify_identity,
    verify_null_condition,
    zd_frequency,
    zeta,
)
from wwbirkhoff.constants import MINUS, PLUS
from wwbirkhoff.poly_hamiltonian import Monomial, PolyHamiltonian
from wwbirkhoff.resonance import is_exact_zero, resonant_monomial_support
from wwbirkhoff.ww_expansion import build_hamiltonian


@pytest.fixture(scope="module")
def report_m4():
    """Identity report at M = 4."""
    return verify_identity(4)


class TestClosedForm:
    """Tests for the explicit Zakharov-Dyachenko quartic term."""

    def test_self_interaction(self):
        """|z₂|⁴ has coefficient 2/π."""
        assert explicit_hzd4(3).coefficient(Monomial.action(2, 2)) == pytest.approx(2.0 / math.pi)

    def test_opposite_modes(self):
        """|z₃|²|z₋₃|² has coefficient -27/π."""
        assert explicit_hzd4(3).coefficient(Monomial.action(3, -3)) == pytest.approx(-27.0 / math.pi)

    def test_same_sign_pair(self):
        """|z₂|²|z₁|² has 2/π and |z₋₂|²|z₁|² has -2/π."""
        H = explicit_hzd4(3)
        assert H.coefficient(Monomial.action(2, 1)) == pytest.approx(2.0 / math.pi)
        assert H.coefficient(Monomial.action(-2, 1)) == pytest.approx(-2.0 / math.pi)

    def test_action_form_agrees(self):
        """The I₁/I₂ display expands to the same coefficients."""
        assert action_form_hzd4(6).max_difference(explicit_hzd4(6)) < 1e-12

    def test_only_actions(self):
        """Every monomial is an action monomial."""
        assert all(m.is_action() for m in explicit_hzd4(5))


class TestNormalForm:
    """Tests for Π_ker(H⁴ + ½{F³, H³})."""

    def test_structure(self):
        """The normal form is real, quartic and resonant."""
        nf = compute_normal_form(3)
        assert len(nf) > 0
        assert nf.degrees == frozenset({4})
        assert nf.is_real()
        assert all(is_exact_zero(m.signed_tuple()) for m in nf)

    def test_bad_truncation(self):
        """M must be at least 2."""
        with pytest.raises((ValueError, NormalFormError)):
            compute_normal_form(1)

    def test_identity_passes(self, report_m4):
        """The computed normal form equals the closed form at M = 4."""
        assert report_m4.passed
        assert report_m4.max_resonant_coeff_error < 1e-9
        assert report_m4.max_offresonant_leak < 1e-9
        assert report_m4.max_value_error < 1e-9

    def test_report_schema(self, report_m4):
        """The emitted report validates against its schema."""
        ok, message = report_m4.validate_schema()
        assert ok, message
        data = json.loads(report_m4.to_json())
        assert set(data) == set(REPORT_SCHEMA["required"])
        assert data["pass"] is True

    def test_perturbed_quartic_fails(self):
        """A wrong quartic term is detected."""
        support = resonant_monomial_support(3)
        quartic = build_hamiltonian(3, 4, support) + PolyHamiltonian({Monomial.action(1, 2): 0.1})
        assert not verify_identity(3, quartic=quartic).passed

    def test_zero_tolerance_fails(self):
        """Errors must be strictly below tol."""
        assert not verify_identity(3, tol=0.0).passed

    def test_negative_tolerance(self):
        """Negative tolerances are rejected."""
        with pytest.raises((ValueError, NormalFormError)):
            verify_identity(3, tol=-1.0)

    @pytest.mark.slow
    def test_identity_large(self):
        """The identity holds at M = 24."""
        assert verify_identity(24, workers=4).passed

    @pytest.mark.slow
    @pytest.mark.parametrize("M", [8, 12, 16])
    def test_identity_acceptance(self, M):
        """The identity holds at the intermediate truncations."""
        report = verify_identity(M, workers=4)
        assert report.passed
        assert report.max_resonant_coeff_error < 1e-9
        assert report.max_offresonant_leak < 1e-9

    @pytest.mark.slow
    def test_computed_coefficients_m12(self):
        """At M = 12 the computed |z₂|⁴ and |z₃|²|z₋₃|² coefficients are 2/π and -27/π."""
        nf = compute_normal_form(12, workers=4)
        assert nf.coefficient(Monomial.action(2, 2)).real == pytest.approx(2.0 / math.pi, rel=1e-9)
        assert nf.coefficient(Monomial.action(3, -3)).real == pytest.approx(-27.0 / math.pi, rel=1e-9)
        assert abs(nf.coefficient(Monomial.action(2, 2)).imag) < 1e-12


class TestNullCondition:
    """Tests for the Benjamin-Feir null condition."""

    def test_bf_parameters(self):
        """Inside |n| <= 40 the BF tuples are λ = ±1..±4 with b = 1."""
        pairs = bf_tuples_within(40)
        assert {b for _, b in pairs} == {1}
        assert sorted(lam for lam, _ in pairs) == [-4, -3, -2, -1, 1, 2, 3, 4]

    def test_none_below_nine(self):
        """No BF tuple fits inside |n| <= 8."""
        assert bf_tuples_within(8) == []
        assert verify_null_condition(8) == []

    def test_bf_coefficient_vanishes(self):
        """BF(±1, 1) have vanishing normal-form coefficients at M = 9."""
        nf = compute_normal_form(9)
        bf = verify_null_condition(9, normal_form=nf)
        assert [(c.lam, c.b) for c in bf] == [(-1, 1), (1, 1)]
        assert all(c.coeff_abs <= 1e-10 * nf.max_abs_coefficient() for c in bf)

    @pytest.mark.slow
    def test_null_condition_large(self):
        """Every BF coefficient vanishes at M = 40."""
        nf = compute_normal_form(40, workers=4)
        bf = verify_null_condition(40, normal_form=nf)
        assert len(bf) == 8
        assert all(c.coeff_abs <= 1e-10 * nf.max_abs_coefficient() for c in bf)


class TestFrequencies:
    """Tests for Ω(I) = ω + A I."""

    def test_single_mode(self):
        """Ω₁ = 1 + I₁/(2π) when only mode 1 is excited."""
        assert zd_frequency(1, {1: 0.5}) == pytest.approx(1.0 + 0.5 / (2.0 * math.pi))

    def test_linear_limit(self):
        """Zero actions give ω."""
        assert zd_frequency(4, {}) == pytest.approx(2.0)

    def test_transport_part(self):
        """Ω₂ - ω₂ = 2I₁/π is entirely transport."""
        transport, remainder = transport_split(2, {1: 0.3})
        assert transport == pytest.approx(0.6 / math.pi)
        assert remainder == pytest.approx(0.0, abs=1e-15)

    def test_high_mode_is_remainder(self):
        """A higher excited mode feeds the remainder only."""
        transport, remainder = transport_split(1, {2: 0.3})
        assert transport == 0.0
        assert remainder == pytest.approx(0.6 / math.pi)

    def test_zeta(self):
        """ζ(I₂ = 1) = 4/π; opposite modes cancel."""
        assert zeta({2: 1.0}) == pytest.approx(4.0 / math.pi)
        assert zeta({2: 1.0, -2: 1.0}) == 0.0

    def test_negative_action(self):
        """Actions are non-negative."""
        with pytest.raises((ValueError, NormalFormError)):
            zd_frequency(1, {1: -0.1})

    def test_rejects_non_action_terms(self):
        """Only action Hamiltonians have a frequency map."""
        H = PolyHamiltonian({
            Monomial.of((1, PLUS), (1, PLUS), (2, MINUS)): 1.0,
            Monomial.of((1, MINUS), (1, MINUS), (2, PLUS)): 1.0,
        })
        with pytest.raises((ValueError, NormalFormError)):
            ActionFrequencyMap.from_hamiltonian(H, 2)

    def test_energy_matches_hamiltonian(self):
        """The map's energy is H² + H_ZD⁴ on actions."""
        fmap = ActionFrequencyMap.zakharov_dyachenko(2)
        I = np.array([0.1, 0.2, 0.3, 0.4])
        expected = float(np.sqrt([2, 1, 1, 2]) @ I)
        H4 = explicit_hzd4(2)
        for m, c in H4.items():
            modes = [f.k for f in m.factors if f.sigma == PLUS]
            expected += c.real * I[[-2, -1, 1, 2].index(modes[0])] * I[[-2, -1, 1, 2].index(modes[1])]
        assert fmap.energy(I) == pytest.approx(expected)

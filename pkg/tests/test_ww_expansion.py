"""
Water-Waves Expansion Tests
---------------------------
Tests for the Dirichlet-Neumann terms, the energies, the complex-variable
Hamiltonian and the probed coefficients.
"""

import math

import numpy as np
import pytest

from wwbirkhoff.constants import MINUS, PLUS
from wwbirkhoff.poly_hamiltonian import Monomial, evaluate
from wwbirkhoff.spectral_core import RealPair, SpectralField, to_complex, to_grid
from wwbirkhoff.ww_expansion import (
    DNOrder,
    ExpansionError,
    PseudoSpectralGrid,
    UnknownFunctionalError,
    build_hamiltonian,
    closed_form,
    coefficient_table,
    cubic_energy,
    dn_apply,
    extract_bilinear,
    hamiltonian_coefficient,
    paraproduct,
    quadratic_energy,
    quartic_coefficient,
    quartic_energy,
    rhs_quadratic,
)


def _trig(M, cos=None, sin=None):
    return SpectralField.trigonometric(M, cos=cos, sin=sin)


class TestDirichletNeumann:
    """Tests for G₀, G₁, G₂."""

    def test_g0_is_abs_derivative(self):
        """G₀ψ = |D|ψ."""
        out = dn_apply(DNOrder.G0, _trig(4), _trig(4, cos={3: 1.0}))
        np.testing.assert_allclose(out.amplitudes, _trig(4, cos={3: 3.0}).amplitudes, atol=1e-13)

    def test_g1_low_mode(self):
        """G₁(cos 2x) cos x = -cos x."""
        out = dn_apply(DNOrder.G1, _trig(3, cos={2: 1.0}), _trig(3, cos={1: 1.0}))
        np.testing.assert_allclose(out.amplitudes, _trig(3, cos={1: -1.0}).amplitudes, atol=1e-13)

    def test_g1_vanishes_on_equal_modes(self):
        """G₁(cos x) cos x = 0."""
        out = dn_apply(DNOrder.G1, _trig(2, cos={1: 1.0}), _trig(2, cos={1: 1.0}))
        assert out.max_abs() < 1e-13

    def test_g2_vanishes_for_flat_surface(self):
        """G₂(0) = 0."""
        out = dn_apply(DNOrder.G2, _trig(3), _trig(3, sin={2: 1.0}))
        assert out.max_abs() < 1e-14

    def test_truncation_mismatch(self):
        """η and ψ must share the truncation."""
        with pytest.raises(ValueError):
            dn_apply(DNOrder.G1, _trig(2), _trig(3))

    def test_out_truncation(self):
        """The result can be cut to a smaller truncation."""
        out = dn_apply(DNOrder.G1, _trig(3, cos={2: 1.0}), _trig(3, cos={1: 1.0}), out_truncation=1)
        assert out.truncation == 1
        assert out.amplitude(1) == pytest.approx(-math.sqrt(2.0 * math.pi) / 2, abs=1e-13)


class TestEnergies:
    """Tests for the quadratures of H², H³, H⁴."""

    def test_quadratic(self):
        """½∫η² for η = cos x is π/2."""
        p = RealPair(_trig(2, cos={1: 1.0}), _trig(2))
        assert quadratic_energy(p) == pytest.approx(math.pi / 2)

    def test_cubic_example(self, cos_pair):
        """H³(cos 2x, cos x) = -π/2."""
        assert cubic_energy(cos_pair) == pytest.approx(-math.pi / 2)

    def test_cubic_forms_agree(self, random_pair):
        """Reduced and Dirichlet forms of H³ coincide."""
        assert cubic_energy(random_pair, "dirichlet") == pytest.approx(cubic_energy(random_pair), abs=1e-13)

    def test_unknown_cubic_form(self, cos_pair):
        """Unknown cubic forms are rejected."""
        with pytest.raises((ValueError, ExpansionError)):
            cubic_energy(cos_pair, "weak")

    def test_grid_energy_sums_terms(self, random_pair):
        """The grid energy is H² + H³ + H⁴."""
        grid = PseudoSpectralGrid(3)
        total = grid.energy(random_pair.eta.amplitudes, random_pair.psi.amplitudes, 4)
        parts = quadratic_energy(random_pair) + cubic_energy(random_pair) + quartic_energy(random_pair)
        assert total == pytest.approx(parts, abs=1e-13)

    def test_gradient_matches_difference(self, random_pair):
        """∇_η H agrees with a directional difference of the energy."""
        grid = PseudoSpectralGrid(3)
        eta, psi = random_pair.eta.amplitudes, random_pair.psi.amplitudes
        direction = SpectralField.trigonometric(3, cos={2: 1.0}).amplitudes
        grad_eta, _ = grid.gradients(eta, psi, 4)
        h = 1e-6
        numeric = (grid.energy(eta + h * direction, psi, 4) - grid.energy(eta - h * direction, psi, 4)) / (2 * h)
        analytic = float(np.real(np.vdot(direction, grad_eta)))
        assert analytic == pytest.approx(numeric, rel=1e-6)


class TestRightHandSide:
    """Tests for the quadratic-order water-waves vector field."""

    def test_flat_surface(self):
        """η = 0, ψ = cos x: η̇ = cos x, ψ̇ = ½ cos 2x."""
        rhs = rhs_quadratic(RealPair(_trig(2), _trig(2, cos={1: 1.0})))
        np.testing.assert_allclose(rhs.eta.amplitudes, _trig(2, cos={1: 1.0}).amplitudes, atol=1e-13)
        np.testing.assert_allclose(rhs.psi.amplitudes, _trig(2, cos={2: 0.5}).amplitudes, atol=1e-13)

    def test_still_water(self):
        """ψ = 0: η̇ = 0, ψ̇ = -η."""
        rhs = rhs_quadratic(RealPair(_trig(2, sin={1: 1.0}), _trig(2)))
        assert rhs.eta.max_abs() < 1e-14
        np.testing.assert_allclose(rhs.psi.amplitudes, _trig(2, sin={1: -1.0}).amplitudes, atol=1e-13)


class TestComplexHamiltonian:
    """Tests for H², H³, H⁴ in complex variables."""

    def test_h2_coefficient(self):
        """The coefficient of u₄ū₄ is ω(4) = 2."""
        assert hamiltonian_coefficient(Monomial.action(4)) == pytest.approx(2.0)

    def test_h2_term_count(self):
        """H² at M = 2 has 2M = 4 terms."""
        assert len(build_hamiltonian(2, 2)) == 4

    def test_bad_degree(self):
        """Only degrees 2, 3, 4 exist."""
        with pytest.raises((ValueError, ExpansionError)):
            build_hamiltonian(4, 5)

    def test_bad_truncation(self):
        """M must be at least 2."""
        with pytest.raises((ValueError, ExpansionError)):
            build_hamiltonian(1, 3)

    def test_quartic_coefficient_degree(self):
        """quartic_coefficient only accepts degree-4 monomials."""
        with pytest.raises((ValueError, ExpansionError)):
            quartic_coefficient(Monomial.action(1))

    def test_h3_matches_quadrature(self, cos_pair):
        """The sparse H³ evaluated on u equals the cubic energy."""
        H3 = build_hamiltonian(3, 3)
        assert evaluate(H3, to_complex(cos_pair)).real == pytest.approx(-math.pi / 2, abs=1e-12)

    def test_h4_matches_quadrature(self, random_pair):
        """The sparse H⁴ evaluated on u equals ½∫ψG₂(η)ψ."""
        H4 = build_hamiltonian(3, 4)
        value = evaluate(H4, to_complex(random_pair))
        assert value.real == pytest.approx(quartic_energy(random_pair), rel=1e-10, abs=1e-16)
        assert abs(value.imag) < 1e-14

    @pytest.mark.slow
    def test_quadrature_on_random_fields(self):
        """H³ and H⁴ match their quadratures on 50 random fields at M = 8."""
        M = 8
        H3 = build_hamiltonian(M, 3)
        H4 = build_hamiltonian(M, 4)
        for seed in range(50):
            p = RealPair(
                SpectralField.random(M, seed=2 * seed, decay=0.3).scale(0.1),
                SpectralField.random(M, seed=2 * seed + 1, decay=0.3).scale(0.1),
            )
            c = to_complex(p)
            assert evaluate(H3, c).real == pytest.approx(cubic_energy(p), rel=1e-10, abs=1e-16)
            assert evaluate(H4, c).real == pytest.approx(quartic_energy(p), rel=1e-10, abs=1e-16)

    def test_support_restriction(self):
        """Building on a support keeps only those monomials."""
        m = Monomial.action(1, 2)
        H = build_hamiltonian(3, 4, support=[m.factors])
        assert list(H) == [m]
        assert H.coefficient(m) == pytest.approx(quartic_coefficient(m))


class TestProbes:
    """Tests for probed coefficients of the paralinearised system."""

    def test_v1(self):
        """(V₁)⁺₄ = 2."""
        assert extract_bilinear("V1", 4, PLUS) == pytest.approx(2.0, abs=1e-10)

    def test_a1(self):
        """(a₁)⁺₁ = -1/(2√2)."""
        assert extract_bilinear("a1", 1, PLUS) == pytest.approx(-1.0 / (2.0 * math.sqrt(2.0)), abs=1e-10)

    def test_f2(self):
        """(F₂)^{+-}_{1,-1} = 2^{-1/4}."""
        assert extract_bilinear("F2", 1, PLUS, -1, MINUS) == pytest.approx(2.0 ** -0.25, abs=1e-10)

    def test_minus_plus_reads_swapped(self):
        """(-, +) at (n1, n2) is the (+, -) coefficient at (n2, n1)."""
        a = extract_bilinear("F2", -1, MINUS, 1, PLUS)
        b = extract_bilinear("F2", 1, PLUS, -1, MINUS)
        assert a == pytest.approx(b, abs=1e-14)

    def test_v2_diagonal(self):
        """(V₂)^{+-}_{3,3} = 9 and (V₂)^{+-}_{2,-2} = 0."""
        assert extract_bilinear("V2", 3, PLUS, 3, MINUS) == pytest.approx(9.0, abs=1e-9)
        assert abs(extract_bilinear("V2", 2, PLUS, -2, MINUS)) < 1e-9

    def test_v2_off_paraproduct(self):
        """(V₂)^{+-}_{1,5} = ½(5·5^{1/4} + 5^{3/4})."""
        expected = 0.5 * (5.0 * 5.0 ** 0.25 + 5.0 ** 0.75)
        assert extract_bilinear("V2", 1, PLUS, 5, MINUS) == pytest.approx(expected, abs=1e-9)

    def test_a2_diagonal(self):
        """(a₂)^{+-}_{2,2} = ½ 2^{5/2}."""
        assert extract_bilinear("a2", 2, PLUS, 2, MINUS) == pytest.approx(0.5 * 2.0 ** 2.5, abs=1e-9)

    def test_unknown_functional(self):
        """Unknown tags are rejected."""
        with pytest.raises((ValueError, UnknownFunctionalError)):
            extract_bilinear("V9", 1, PLUS)

    def test_linear_takes_one_mode(self):
        """A second mode on a linear functional is an error."""
        with pytest.raises((ValueError, ExpansionError)):
            extract_bilinear("V1", 1, PLUS, 2, PLUS)

    def test_quadratic_needs_two_modes(self):
        """A quadratic functional needs both slots."""
        with pytest.raises((ValueError, ExpansionError)):
            extract_bilinear("F2", 1, PLUS)


class TestCoefficientTables:
    """Tests for the tabulated closed forms."""

    @pytest.mark.parametrize("label", ["V1", "a1", "F2", "V2diag", "a2diag"])
    def test_tables_match(self, label):
        """Every tabulated entry with a closed form matches it."""
        table = coefficient_table(label, 3)
        assert table.max_error() < 1e-9

    @pytest.mark.slow
    @pytest.mark.parametrize("label", ["V1", "a1", "F2", "V2diag"])
    def test_tables_to_sixteen(self, label):
        """The closed forms hold for 1 <= n <= 16 to absolute 1e-10."""
        assert coefficient_table(label, 16).max_error() < 1e-10

    @pytest.mark.slow
    def test_a2_diagonal_to_sixteen(self):
        """(a₂)^{+-}_{n,n} grows like n^{5/2}; its error is checked relative to that size."""
        table = coefficient_table("a2diag", 16)
        scale = max(abs(v) for v in table.closed.values() if v is not None)
        assert table.max_error() < 1e-10 * scale

    def test_rows(self):
        """Rows carry label, signs, modes, value and closed form."""
        rows = coefficient_table("V1", 2).to_rows()
        assert len(rows) == 4
        assert rows[0][:3] == ["V1", "+", "1"]

    def test_unknown_table(self):
        """Unknown labels are rejected."""
        with pytest.raises((ValueError, UnknownFunctionalError)):
            coefficient_table("a2off", 2)

    def test_no_closed_form(self):
        """Entries outside the known families have no closed form."""
        assert closed_form("a2diag", (PLUS, MINUS), (2, -2)) is None


class TestParaproduct:
    """Tests for the discrete paraproduct."""

    def test_constant_symbol(self):
        """T_1 b = b."""
        b = to_grid(SpectralField.random(4, seed=2), 18)
        np.testing.assert_allclose(paraproduct(np.ones(18), b), b, atol=1e-12)

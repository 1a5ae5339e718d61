"""Tests for the closed-form bi-phase homogenization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from models import COMPONENTS, HarmonicLoad, Laminate, Layer, ProfileKind
from solvers.laminate_homogenizer import (
    collapse_limits,
    effective_constants_biphase,
    effective_constants_isotropic,
    layer_a_slopes,
    normalize_constants,
    perturbation_profiles_biphase,
    phase_average,
)
from solvers.macro_solver import amplitude_functions
from solvers.material_model import make_isotropic_phase, ratio_laminate
from solvers.validation_suite import as_effective, relative_discrepancy

ratios = st.floats(min_value=0.02, max_value=50.0)
zetas = st.floats(min_value=0.1, max_value=10.0)


# =============================================================================
# Spot values
# =============================================================================

class TestSpotValues:

    def test_conduction_parallel_and_series(self):
        """K_a = 10, K_b = 1, equal thickness: K11 = 5.5, K22 = 20/11."""
        laminate = Laminate.biphase(
            make_isotropic_phase(E=1.0, nu=0.3, K=10.0), make_isotropic_phase(E=1.0, nu=0.3, K=1.0)
        )
        eff = effective_constants_biphase(laminate)
        assert eff.K11 == pytest.approx(5.5, abs=1e-12)
        assert eff.K22 == pytest.approx(20.0 / 11.0, abs=1e-12)

    def test_conduction_profile_slopes(self):
        laminate = Laminate.biphase(
            make_isotropic_phase(E=1.0, nu=0.3, K=10.0), make_isotropic_phase(E=1.0, nu=0.3, K=1.0)
        )
        profile = perturbation_profiles_biphase(laminate)[ProfileKind.M2]
        np.testing.assert_allclose(profile.slopes, [-9.0 / 11.0, 9.0 / 11.0], atol=1e-15)
        assert profile.mean() == pytest.approx(0.0, abs=1e-15)

    def test_normal_stiffness_harmonic_mean(self):
        """E_a = 10, E_b = 1, nu = 0.3, plane stress: C2222 = 1.998002."""
        laminate = Laminate.biphase(make_isotropic_phase(E=10.0, nu=0.3), make_isotropic_phase(E=1.0, nu=0.3))
        eff = effective_constants_biphase(laminate)
        assert eff.C2222 == pytest.approx(1.998002, abs=1e-6)

    def test_equal_phases_give_phase_constants(self, soft_phase):
        laminate = Laminate.biphase(soft_phase, soft_phase, zeta=2.7)
        eff = effective_constants_biphase(laminate)
        assert relative_discrepancy(eff, as_effective(soft_phase)) <= 1e-14
        for profile in perturbation_profiles_biphase(laminate).values():
            np.testing.assert_allclose(profile.slopes, 0.0, atol=1e-15)

    def test_equal_stiffness_coupling_is_arithmetic_mean(self):
        """With equal elastic phases alpha22 and alpha11 reduce to the thickness average."""
        laminate = Laminate.biphase(
            make_isotropic_phase(E=1.0, nu=0.3, alpha=4.0), make_isotropic_phase(E=1.0, nu=0.3, alpha=1.0), zeta=3.0
        )
        eff = effective_constants_biphase(laminate)
        assert eff.alpha22 == pytest.approx(3.25, rel=1e-14)
        assert eff.alpha11 == pytest.approx(3.25, rel=1e-14)

    def test_needs_two_layers(self, three_layer_laminate):
        with pytest.raises(ValueError, match="two layers"):
            effective_constants_biphase(three_layer_laminate)


# =============================================================================
# Isotropic closed forms
# =============================================================================

class TestIsotropicForms:

    @given(rho=ratios, rho_alpha=ratios, rho_beta=ratios, zeta=zetas, nu=st.floats(-0.4, 0.45))
    @settings(max_examples=200, deadline=None)
    def test_agree_with_orthotropic_forms(self, rho, rho_alpha, rho_beta, zeta, nu):
        laminate = ratio_laminate(rho_C=rho, rho_alpha=rho_alpha, rho_beta=rho_beta, zeta=zeta, nu=nu)
        gap = relative_discrepancy(effective_constants_isotropic(laminate), effective_constants_biphase(laminate), laminate)
        assert gap <= 1e-12

    def test_different_poisson_ratios(self):
        a = make_isotropic_phase(E=7.0, nu=0.1, alpha=2.0, beta=-1.0, K=3.0, D=0.5)
        b = make_isotropic_phase(E=1.5, nu=0.4, alpha=0.3, beta=2.0, K=1.0, D=2.0)
        laminate = Laminate.biphase(a, b, zeta=0.6)
        gap = relative_discrepancy(effective_constants_isotropic(laminate), effective_constants_biphase(laminate), laminate)
        assert gap <= 1e-12

    def test_needs_isotropic_inputs(self, mixed_laminate):
        with pytest.raises(ValueError, match="isotropic"):
            effective_constants_isotropic(mixed_laminate)


# =============================================================================
# Normalization, reciprocity and limits
# =============================================================================

class TestNormalization:

    def test_unit_ratios_normalize_to_one(self):
        normalized = normalize_constants(effective_constants_biphase(ratio_laminate()), ratio_laminate())
        for name in COMPONENTS:
            assert normalized.get(name) == pytest.approx(1.0, rel=1e-14)

    def test_vanishing_average_is_undefined(self):
        a = make_isotropic_phase(E=2.0, nu=0.3)
        b = make_isotropic_phase(E=1.0, nu=0.3)
        laminate = Laminate.biphase(a, b)
        normalized = normalize_constants(effective_constants_biphase(laminate), laminate)
        assert normalized.get("alpha11") is None
        assert set(normalized.undefined) == {"alpha11", "alpha22", "beta11", "beta22"}

    def test_phase_average_ignores_thickness(self, reference_laminate):
        assert phase_average(reference_laminate, "K11") == 5.5
        thick = Laminate.biphase(*reference_laminate.phases, zeta=9.0)
        assert phase_average(thick, "K11") == 5.5

    @given(rho=ratios, zeta=zetas)
    @settings(max_examples=100, deadline=None)
    def test_reciprocity(self, rho, zeta):
        """Normalized constants and amplitudes are unchanged by rho -> 1/rho, zeta -> 1/zeta."""
        forward = ratio_laminate(rho_C=rho, rho_alpha=rho, rho_beta=rho, rho_K=rho, rho_D=rho, zeta=zeta)
        backward = ratio_laminate(
            rho_C=1 / rho, rho_alpha=1 / rho, rho_beta=1 / rho, rho_K=1 / rho, rho_D=1 / rho, zeta=1 / zeta
        )
        first = normalize_constants(effective_constants_biphase(forward), forward)
        second = normalize_constants(effective_constants_biphase(backward), backward)
        for name in COMPONENTS:
            assert first.get(name) == pytest.approx(second.get(name), rel=1e-12)
        for direction in (1, 2):
            load = HarmonicLoad(direction=direction, B=1.0)
            x = amplitude_functions(effective_constants_biphase(forward), forward, load)
            y = amplitude_functions(effective_constants_biphase(backward), backward, load)
            assert x.xi_alpha_tilde == pytest.approx(y.xi_alpha_tilde, rel=1e-12)
            assert x.xi_beta_tilde == pytest.approx(y.xi_beta_tilde, rel=1e-12)

    @pytest.mark.parametrize("rho", [1 / 50, 0.1, 2.0, 10.0, 50.0])
    def test_collapse_to_a_phase(self, rho):
        """A vanishing layer leaves the constants of the other phase."""
        laminate = ratio_laminate(rho_C=rho, rho_alpha=rho, rho_beta=rho, rho_K=rho, rho_D=rho)
        limits = collapse_limits(laminate)
        a, b = laminate.phases
        thin_a = Laminate(layers=(Layer(phase=a, fraction=1e-6), Layer(phase=b, fraction=1 - 1e-6)))
        thin_b = Laminate(layers=(Layer(phase=a, fraction=1 - 1e-6), Layer(phase=b, fraction=1e-6)))
        assert relative_discrepancy(effective_constants_biphase(thin_a), as_effective(limits["b"]), laminate) <= 1e-4
        assert relative_discrepancy(effective_constants_biphase(thin_b), as_effective(limits["a"]), laminate) <= 1e-4

    @pytest.mark.parametrize("rho", [0.1, 2.0, 10.0])
    @pytest.mark.parametrize("name", ["K11", "K22", "C1111", "C2222", "alpha22"])
    def test_thickness_limits(self, rho, name):
        """
        zeta -> infinity gives 2 rho/(1+rho), zeta -> 0 gives 2/(1+rho).

        Checked at zeta = 1e5 and 1e-5: the harmonic-mean components approach
        their limits only like rho/zeta, so at zeta = 1e3 and rho = 10 the K22
        gap is still about 1.6e-2.
        """
        for zeta, expected in ((1e5, 2 * rho / (1 + rho)), (1e-5, 2 / (1 + rho))):
            laminate = ratio_laminate(rho_C=rho, rho_alpha=rho, rho_K=rho, zeta=zeta)
            normalized = normalize_constants(effective_constants_biphase(laminate), laminate)
            assert normalized.get(name) == pytest.approx(expected, abs=1e-3)


def test_layer_a_slopes_close_the_cell(mixed_laminate):
    zeta = mixed_laminate.zeta
    for kind, slope in layer_a_slopes(mixed_laminate).items():
        profile = perturbation_profiles_biphase(mixed_laminate)[kind]
        assert profile.slopes == pytest.approx((slope, -zeta * slope))
        assert abs(profile.closure()) <= 1e-14 * max(1.0, abs(slope))

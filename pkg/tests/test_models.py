"""Tests for the domain value types: admissibility, laminate stacks and profiles."""

import numpy as np
import pytest
from pydantic import ValidationError

from models import (
    EffectiveProperties,
    HarmonicLoad,
    Laminate,
    Layer,
    PerturbationProfile,
    PhaseProperties,
    ProfileKind,
)
from solvers.material_model import make_isotropic_phase


def orthotropic(**overrides):
    values = dict(
        C1111=2.0, C2222=3.0, C1122=0.5, C1212=1.0,
        K11=1.0, K22=1.0, D11=1.0, D22=1.0,
    )
    values.update(overrides)
    return PhaseProperties(**values)


# =============================================================================
# Phase admissibility
# =============================================================================

class TestPhaseProperties:

    def test_admissible_phase_builds(self):
        phase = orthotropic()
        assert phase.alpha11 == 0.0
        assert np.all(np.linalg.eigvalsh(phase.voigt_matrix()) > 0)

    def test_coupling_violating_positive_definiteness_rejected(self):
        """C1122^2 >= C1111*C2222 is not positive definite."""
        with pytest.raises(ValidationError, match="positive definite"):
            orthotropic(C1122=np.sqrt(6.0) + 1e-9)

    @pytest.mark.parametrize("name", ["K11", "K22", "D11", "D22"])
    def test_non_positive_transport_rejected(self, name):
        with pytest.raises(ValidationError, match=name):
            orthotropic(**{name: -1.0})

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError, match="finite"):
            orthotropic(alpha22=float("nan"))

    def test_frozen(self):
        phase = orthotropic()
        with pytest.raises(ValidationError):
            phase.C1111 = 5.0

    def test_as_row_lists_every_component(self):
        row = orthotropic(beta22=0.25).as_row()
        assert list(row)[:4] == ["C1111", "C2222", "C1122", "C1212"]
        assert row["beta22"] == 0.25
        assert len(row) == 12


# =============================================================================
# Laminate stack
# =============================================================================

class TestLaminate:

    def test_biphase_fractions_follow_zeta(self, stiff_phase, soft_phase):
        laminate = Laminate.biphase(stiff_phase, soft_phase, zeta=3.0)
        np.testing.assert_allclose(laminate.fractions, [0.75, 0.25])
        assert laminate.zeta == pytest.approx(3.0, rel=1e-14)

    def test_fractions_must_sum_to_one(self, soft_phase):
        with pytest.raises(ValidationError, match="sum"):
            Laminate(layers=(Layer(phase=soft_phase, fraction=0.5), Layer(phase=soft_phase, fraction=0.4)))

    @pytest.mark.parametrize("fraction", [0.0, -0.2, 1.5])
    def test_fraction_outside_unit_interval_rejected(self, soft_phase, fraction):
        with pytest.raises(ValidationError, match="thickness fraction"):
            Layer(phase=soft_phase, fraction=fraction)

    def test_empty_stack_rejected(self):
        with pytest.raises(ValidationError):
            Laminate(layers=())

    def test_zeta_needs_two_layers(self, three_layer_laminate):
        with pytest.raises(ValueError, match="bi-phase"):
            three_layer_laminate.zeta

    def test_split_keeps_averages(self, three_layer_laminate):
        split = three_layer_laminate.split(4)
        assert split.n_layers == 12
        assert split.average("K11") == pytest.approx(three_layer_laminate.average("K11"), rel=1e-14)


# =============================================================================
# Profiles and loads
# =============================================================================

class TestPerturbationProfile:

    def test_from_slopes_is_zero_mean_and_continuous(self):
        profile = PerturbationProfile.from_slopes(ProfileKind.M2, [0.25, 0.75], [3.0, -1.0])
        assert profile.closure() == pytest.approx(0.0, abs=1e-15)
        assert profile.mean() == pytest.approx(0.0, abs=1e-15)
        assert profile.continuity_gap() == pytest.approx(0.0, abs=1e-15)

    def test_evaluation_is_periodic(self):
        profile = PerturbationProfile.from_slopes(ProfileKind.N222, [0.5, 0.5], [1.0, -1.0])
        xi = np.linspace(0.0, 1.0, 17)
        np.testing.assert_allclose(profile(xi + 2.0), profile(xi), atol=1e-14)
        np.testing.assert_allclose(profile.derivative([0.1, 0.7]), [1.0, -1.0])

    def test_tent_values(self):
        """Slopes +1 then -1 on halves: a tent from -1/4 to +1/4."""
        profile = PerturbationProfile.from_slopes(ProfileKind.N222, [0.5, 0.5], [1.0, -1.0])
        np.testing.assert_allclose(profile([0.0, 0.5, 0.25]), [-0.25, 0.25, 0.0], atol=1e-15)


class TestHarmonicLoad:

    def test_defaults(self):
        load = HarmonicLoad()
        assert (load.direction, load.B, load.R, load.S, load.L) == (2, 0.0, 0.0, 0.0, 1.0)

    def test_zero_wave_number_with_source_rejected(self):
        with pytest.raises(ValidationError, match="wave number n"):
            HarmonicLoad(R=1.0, n=0)

    def test_non_positive_period_rejected(self):
        with pytest.raises(ValidationError, match="L must be positive"):
            HarmonicLoad(B=1.0, L=0.0)

    def test_scaled(self):
        load = HarmonicLoad(B=1.0, R=2.0, S=3.0).scaled(2.0, 0.5, 0.0)
        assert (load.B, load.R, load.S) == (2.0, 1.0, 0.0)


def test_violations_flags_non_negligible_off_diagonal():
    phase = make_isotropic_phase(E=1.0, nu=0.3)
    eff = EffectiveProperties(**phase.as_row(), K12=0.1)
    assert eff.violations() == ["K12 not negligible"]
    assert EffectiveProperties(**phase.as_row()).violations() == []

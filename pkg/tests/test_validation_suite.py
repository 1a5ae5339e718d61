"""Tests for the invariant checks behind `lamhom validate`."""

import pytest

from models import EffectiveProperties, Laminate
from solvers.material_model import make_isotropic_phase
from solvers.validation_suite import (
    as_effective,
    check_bounds,
    check_collapse,
    check_reciprocity,
    relative_discrepancy,
    run_validation,
)

ALWAYS = {
    "phase_admissibility",
    "cell_problem_balance",
    "profiles_zero_mean_continuous",
    "effective_symmetric_positive",
    "refinement_invariance",
    "mixture_bounds",
    "homogeneous_limit",
    "macro_residual",
}


class TestRunValidation:

    def test_isotropic_biphase_runs_every_check(self, reference_laminate):
        summary = run_validation(reference_laminate)
        assert summary.passed, summary.failed
        assert {check.name for check in summary.checks} == ALWAYS | {
            "closed_form_oracle", "phase_collapse", "reciprocity"
        }

    def test_orthotropic_biphase_skips_reciprocity(self, mixed_laminate):
        summary = run_validation(mixed_laminate)
        assert summary.passed, summary.failed
        assert "reciprocity" not in {check.name for check in summary.checks}
        assert "closed_form_oracle" in {check.name for check in summary.checks}

    def test_multilayer_runs_general_checks_only(self, three_layer_laminate):
        summary = run_validation(three_layer_laminate)
        assert summary.passed, summary.failed
        assert {check.name for check in summary.checks} == ALWAYS

    def test_broken_closed_form_is_reported(self, reference_laminate, monkeypatch):
        def wrong(laminate):
            return EffectiveProperties(**laminate.phases[0].as_row())

        monkeypatch.setattr("solvers.validation_suite.effective_constants_biphase", wrong)
        summary = run_validation(reference_laminate)
        assert not summary.passed
        assert "closed_form_oracle" in summary.failed
        assert len(summary.checks) == len(ALWAYS) + 3


class TestChecks:

    def test_bounds_detail(self, reference_laminate):
        check = check_bounds(reference_laminate)
        assert check.passed
        assert check.detail == "all bounds hold"

    def test_collapse_within_tolerance(self, reference_laminate):
        assert check_collapse(reference_laminate).passed

    def test_reciprocity_skipped_for_different_poisson_ratios(self):
        laminate = Laminate.biphase(make_isotropic_phase(E=2.0, nu=0.2), make_isotropic_phase(E=1.0, nu=0.35))
        check = check_reciprocity(laminate)
        assert check.passed
        assert check.detail.startswith("skipped")

    def test_reciprocity_skipped_for_zero_ratio(self, figure_laminate):
        check = check_reciprocity(figure_laminate)
        assert check.passed
        assert "zero or undefined" in check.detail


def test_relative_discrepancy_scales_by_phase_values(soft_phase, stiff_phase):
    first = as_effective(soft_phase)
    second = EffectiveProperties(**{**soft_phase.as_row(), "alpha22": soft_phase.alpha22 + 0.1})
    laminate = Laminate.biphase(stiff_phase, soft_phase)
    assert relative_discrepancy(first, second) == pytest.approx(0.1 / 1.1)
    assert relative_discrepancy(first, second, laminate) == pytest.approx(0.1 / 10.0)

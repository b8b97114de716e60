import datetime as dt

import numpy as np
import pytest

from perfdecomp import pipeline
from perfdecomp.emd import EemdConfig
from perfdecomp.errors import NonExtrapolableError, ValidationError
from perfdecomp.model import Trace, reconstruct
from perfdecomp.pipeline import Recipe, RecipeStep, sab_default_recipe


def _trace(values, start=dt.date(2024, 1, 1)):
    return Trace(start, np.asarray(values, dtype=np.float64))


class TestRecipe:
    def test_first_step_must_be_trend(self):
        with pytest.raises(ValidationError):
            Recipe("bad", (RecipeStep("weekly", "sinusoid", {"period": 7.0}),))

    def test_band_family_compatibility(self):
        with pytest.raises(ValidationError):
            RecipeStep("trend", "sinusoid", {"period": 30.0})
        with pytest.raises(ValidationError):
            RecipeStep("weekly", "linear", {})

    def test_default_recipe_shape(self):
        recipe = sab_default_recipe()
        assert recipe.steps[0].band == "trend"
        families = [s.family for s in recipe.steps]
        assert "sinusoid" in families and "hwes" in families


class TestRunHybrid:
    def test_additive_reconstruction(self, synthetic_trace):
        result = pipeline.run_hybrid(synthetic_trace, sab_default_recipe())
        recon = reconstruct(result)
        rel = np.max(np.abs(recon - result.source.values)) / np.max(
            np.abs(result.source.values)
        )
        assert rel <= 1e-9

    def test_component_labels_follow_steps(self, synthetic_trace):
        recipe = sab_default_recipe()
        result = pipeline.run_hybrid(synthetic_trace, recipe)
        assert len(result.components) == len(recipe.steps)
        for i, (comp, step) in enumerate(zip(result.components, recipe.steps)):
            assert comp.band == step.band
            assert comp.label.startswith(f"step{i + 1} {step.family}")

    def test_outlier_diagnostics_reported(self, synthetic_trace):
        spiked = synthetic_trace.values.copy()
        spiked[50] += 300.0
        result = pipeline.run_hybrid(_trace(spiked), sab_default_recipe())
        assert result.diagnostics["outliers_replaced"] >= 1

    def test_noiseless_line_flags_degenerate_residual(self):
        recipe = Recipe("line-only", (RecipeStep("trend", "linear", {}),))
        result = pipeline.run_hybrid(_trace(5.0 + 0.25 * np.arange(60)), recipe)
        assert result.diagnostics.get("degenerate_residual") is True
        assert result.residual_random is True

    def test_structured_residual_suggests_period(self):
        t = np.arange(200, dtype=float)
        y = 100 + 0.1 * t + 12 * np.sin(2 * np.pi * t / 28.0)
        recipe = Recipe("line-only", (RecipeStep("trend", "linear", {}),))
        result = pipeline.run_hybrid(_trace(y), recipe)
        assert result.residual_random is False
        assert "suggested_next_period" in result.diagnostics

    def test_refine_passes_zero_is_strictly_sequential(self, synthetic_trace):
        recipe = sab_default_recipe()
        seq = Recipe(recipe.name, recipe.steps, recipe.runs_alpha, refine_passes=0)
        r0 = pipeline.run_hybrid(synthetic_trace, seq)
        r1 = pipeline.run_hybrid(synthetic_trace, recipe)
        # refinement must change the trend fit (that is its purpose here)
        assert not np.allclose(r0.components[0].contribution, r1.components[0].contribution)


class TestRunAuto:
    def test_residual_is_zero_and_bands_labelled(self, synthetic_trace):
        result = pipeline.run_auto(
            synthetic_trace, config=EemdConfig(ensemble_size=30, master_seed=7)
        )
        np.testing.assert_array_equal(result.residual, np.zeros(len(result.residual)))
        assert result.components[-1].band == "trend"
        assert any(c.band in ("weekly", "subweekly") for c in result.components)

    def test_models_are_absent(self, synthetic_trace):
        result = pipeline.run_auto(
            synthetic_trace, config=EemdConfig(ensemble_size=10, master_seed=7)
        )
        assert all(c.model is None for c in result.components)


class TestForecast:
    def test_per_component_additivity(self, synthetic_trace):
        result = pipeline.run_hybrid(synthetic_trace, sab_default_recipe())
        fc = pipeline.forecast(result, 28)
        total = np.zeros(28)
        for _, series in fc.per_component:
            total = total + series
        np.testing.assert_allclose(total, fc.predicted, rtol=0, atol=1e-9)

    def test_metrics_require_matching_length(self, synthetic_trace):
        result = pipeline.run_hybrid(synthetic_trace, sab_default_recipe())
        with pytest.raises(ValidationError):
            pipeline.forecast(result, 28, actual=np.ones(5))

    def test_loess_trend_cannot_extrapolate(self):
        t = np.arange(120, dtype=float)
        y = 50 + 0.2 * t + 5 * np.sin(2 * np.pi * t / 7.0)
        recipe = Recipe(
            "loess-trend",
            (
                RecipeStep("trend", "loess", {"span": 0.3}),
                RecipeStep("weekly", "hwes", {"period": 7}),
            ),
            refine_passes=0,
        )
        result = pipeline.run_hybrid(_trace(y), recipe)
        with pytest.raises(NonExtrapolableError):
            pipeline.forecast(result, 14)

    def test_invalid_horizon(self, synthetic_trace):
        result = pipeline.run_hybrid(synthetic_trace, sab_default_recipe())
        with pytest.raises(ValidationError):
            pipeline.forecast(result, 0)

    def test_auto_forecast_additivity(self, synthetic_trace):
        result = pipeline.run_auto(
            synthetic_trace, config=EemdConfig(ensemble_size=30, master_seed=7)
        )
        fc = pipeline.forecast(result, 21)
        total = np.zeros(21)
        for _, series in fc.per_component:
            total = total + series
        np.testing.assert_allclose(total, fc.predicted, rtol=0, atol=1e-9)


class TestPlanWeekdays:
    @staticmethod
    def _wednesday_peak_trace(offset=0.0):
        n = 140
        t = np.arange(n, dtype=float)
        weekly = 5.0 * np.cos(2 * np.pi * (t - 2) / 7.0)  # peak on Wednesday
        return _trace(100.0 + offset + weekly, start=dt.date(2024, 1, 1))

    def test_wednesday_peak_plan(self):
        tr = self._wednesday_peak_trace()
        result = pipeline.run_hybrid(tr, sab_default_recipe())
        plan = pipeline.plan_weekdays(result, tr, fraction=0.5)
        assert plan.slow_days == ("Tuesday", "Wednesday", "Thursday")

    def test_shift_invariance(self):
        plans = []
        for offset in (0.0, 50.0):
            tr = self._wednesday_peak_trace(offset)
            result = pipeline.run_hybrid(tr, sab_default_recipe())
            plans.append(pipeline.plan_weekdays(result, tr, fraction=0.5).slow_days)
        assert plans[0] == plans[1]

    def test_fraction_bounds(self, synthetic_trace):
        result = pipeline.run_hybrid(synthetic_trace, sab_default_recipe())
        with pytest.raises(ValidationError):
            pipeline.plan_weekdays(result, synthetic_trace, fraction=0.0)


class TestCompareMethods:
    def test_reports_and_ordering_fields(self, synthetic_trace, synthetic_actual):
        report = pipeline.compare_methods(
            synthetic_trace,
            eemd_config=EemdConfig(ensemble_size=30, master_seed=7),
            horizon=28,
            actual=synthetic_actual,
        )
        assert report.hybrid.mape_percent is not None
        assert report.auto.mape_percent is not None
        assert report.stl.mape_percent is not None
        assert report.stl_leftover_acf_value > report.stl_white_noise_band

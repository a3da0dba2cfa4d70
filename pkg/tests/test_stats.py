import math

import numpy as np
import pytest

from joulemark.stats import (
    InsufficientSamplesError,
    UndefinedVariationError,
    format_sig5,
    summarize_campaign,
    t_critical,
    variation_pct,
)

# Five-run oscilloscope energy campaigns used as the cross-check dataset;
# reference_mean/reference_me are the published summary values for the same
# samples (t-based margin of error, 95% confidence, df = 4).
REFERENCE_CAMPAIGNS = {
    1000: ([26.712, 29.644, 27.567, 28.623, 27.453], 28.000, 1.421),
    1500: ([93.514, 91.412, 92.680, 95.338, 86.597], 91.908, 4.090),
    2000: ([196.19, 192.67, 190.57, 193.42, 192.79], 193.13, 2.507),
    2500: ([374.79, 382.81, 381.47, 382.68, 373.81], 379.11, 5.509),
    3000: ([643.40, 652.17, 645.31, 643.32, 649.38], 646.71, 4.860),
}


class TestTCritical:
    # oracle: standard two-sided t table
    def test_df4_at_95(self):
        assert t_critical(4, 0.95) == pytest.approx(2.776, abs=1e-3)

    def test_df1_at_95(self):
        assert t_critical(1, 0.95) == pytest.approx(12.706, abs=1e-3)

    def test_large_df_approaches_normal_quantile(self):
        assert t_critical(1000, 0.95) == pytest.approx(1.960, abs=5e-3)

    def test_other_levels(self):
        assert t_critical(4, 0.90) == pytest.approx(2.132, abs=1e-3)
        assert t_critical(4, 0.99) == pytest.approx(4.604, abs=1e-3)

    def test_rejects_unsupported_confidence(self):
        with pytest.raises(ValueError, match="confidence"):
            t_critical(4, 0.80)

    def test_rejects_zero_df(self):
        with pytest.raises(ValueError):
            t_critical(0, 0.95)


class TestSummarizeCampaign:
    def test_reference_campaign_1000(self):
        samples, ref_mean, ref_me = REFERENCE_CAMPAIGNS[1000]
        s = summarize_campaign(samples, 0.95)
        assert s.mean_j == pytest.approx(ref_mean, abs=1e-3)
        assert s.me_j == pytest.approx(ref_me, abs=1e-3)

    def test_reference_campaign_2000(self):
        samples, ref_mean, ref_me = REFERENCE_CAMPAIGNS[2000]
        s = summarize_campaign(samples, 0.95)
        assert s.mean_j == pytest.approx(ref_mean, abs=5e-3)
        assert s.me_j == pytest.approx(ref_me, abs=5e-3)

    def test_zero_variance_gives_zero_margin(self):
        s = summarize_campaign([5.0, 5.0, 5.0], 0.95)
        assert s.mean_j == 5.0
        assert s.sd_j == 0.0
        assert s.me_j == 0.0
        assert s.ci == (5.0, 5.0)

    def test_rejects_single_sample(self):
        with pytest.raises(InsufficientSamplesError):
            summarize_campaign([1.0])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            summarize_campaign([1.0, math.nan])

    def test_margin_uses_t_over_sqrt_n(self):
        rng = np.random.default_rng(5)
        samples = rng.normal(100.0, 3.0, size=8).tolist()
        s = summarize_campaign(samples, 0.95)
        assert s.me_j == pytest.approx(
            t_critical(7, 0.95) * s.sd_j / math.sqrt(8), rel=1e-12
        )
        assert s.ci == (pytest.approx(s.mean_j - s.me_j), pytest.approx(s.mean_j + s.me_j))

    def test_permutation_invariant(self):
        rng = np.random.default_rng(9)
        samples = rng.uniform(10, 20, size=7).tolist()
        base = summarize_campaign(samples)
        for _ in range(10):
            rng.shuffle(samples)
            s = summarize_campaign(samples)
            assert s.mean_j == pytest.approx(base.mean_j, rel=1e-12)
            assert s.sd_j == pytest.approx(base.sd_j, rel=1e-12)
            assert s.me_j == pytest.approx(base.me_j, rel=1e-12)

    def test_scaling_scales_mean_sd_me_but_not_variation(self):
        rng = np.random.default_rng(13)
        samples = rng.uniform(10, 20, size=6).tolist()
        base = summarize_campaign(samples)
        for k in (0.5, 3.0, 250.0):
            s = summarize_campaign([k * x for x in samples])
            assert s.mean_j == pytest.approx(k * base.mean_j, rel=1e-12)
            assert s.sd_j == pytest.approx(k * base.sd_j, rel=1e-12)
            assert s.me_j == pytest.approx(k * base.me_j, rel=1e-12)
            assert s.variation_pct == pytest.approx(base.variation_pct, rel=1e-9)

    def test_margin_shrinks_like_inverse_sqrt_n(self):
        # hold sd fixed and sweep n through the margin formula
        sd = 2.0
        margins = [t_critical(n - 1, 0.95) * sd / math.sqrt(n) for n in (5, 10, 20, 40, 1000)]
        assert margins == sorted(margins, reverse=True)
        # far from the small-n t inflation, the decay is ~1/sqrt(4) per 4x n
        assert margins[-1] / margins[-2] == pytest.approx(
            math.sqrt(40 / 1000), rel=0.05
        )


class TestVariationPct:
    def test_two_samples(self):
        # (101 - 100) / 100.5 * 100
        assert variation_pct([100.0, 101.0]) == pytest.approx(0.995, abs=1e-3)

    def test_reference_samples(self):
        samples = REFERENCE_CAMPAIGNS[3000][0]
        # (652.17 - 643.32) / 646.716 * 100
        assert variation_pct(samples) == pytest.approx(1.3685, abs=1e-3)

    def test_constant_samples_have_zero_variation(self):
        assert variation_pct([7.0, 7.0, 7.0]) == 0.0

    def test_rejects_zero_mean(self):
        with pytest.raises(UndefinedVariationError):
            variation_pct([-1.0, 1.0])

    def test_rejects_single_sample(self):
        with pytest.raises(InsufficientSamplesError):
            variation_pct([1.0])


class TestSerialization:
    def test_csv_row_is_samples_then_mean_then_margin(self):
        samples, _, _ = REFERENCE_CAMPAIGNS[1000]
        s = summarize_campaign(samples, 0.95)
        cells = s.to_csv_row().split(",")
        assert len(cells) == 7
        assert [float(c) for c in cells[:5]] == pytest.approx(samples, rel=1e-4)
        assert float(cells[5]) == pytest.approx(s.mean_j, rel=1e-4)
        assert float(cells[6]) == pytest.approx(s.me_j, rel=1e-4)

    def test_display_rounding_keeps_five_significant_digits(self):
        assert format_sig5(27.9998) == "28.000"
        assert format_sig5(646.716) == "646.72"

    def test_json_dict_round_trips_ci(self):
        s = summarize_campaign([1.0, 2.0, 3.0])
        d = s.to_json_dict()
        assert d["n"] == 3
        assert d["ci"] == [s.ci[0], s.ci[1]]
        assert d["mean_j"] == s.mean_j

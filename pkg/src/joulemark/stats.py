"""Repeated-measurement statistics: mean, sample deviation, t-based margin
of error, and percent variation across runs.

The Student-t critical values are embedded for degrees of freedom 1..30 at
the 90/95/99% two-sided confidence levels; beyond 30, the normal limit is
used.  This keeps the module free of special-function dependencies while
covering the small-campaign regime (five runs -> df 4) exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class InsufficientSamplesError(ValueError):
    pass


class UndefinedVariationError(ValueError):
    pass


# Two-sided critical values of Student's t, df 1..30 per row.
_T_TABLE: dict[float, tuple[float, ...]] = {
    0.90: (
        6.314, 2.920, 2.353, 2.132, 2.015, 1.943, 1.895, 1.860, 1.833, 1.812,
        1.796, 1.782, 1.771, 1.761, 1.753, 1.746, 1.740, 1.734, 1.729, 1.725,
        1.721, 1.717, 1.714, 1.711, 1.708, 1.706, 1.703, 1.701, 1.699, 1.697,
    ),
    0.95: (
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201, 2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
    ),
    0.99: (
        63.657, 9.925, 5.841, 4.604, 4.032, 3.707, 3.499, 3.355, 3.250, 3.169,
        3.106, 3.055, 3.012, 2.977, 2.947, 2.921, 2.898, 2.878, 2.861, 2.845,
        2.831, 2.819, 2.807, 2.797, 2.787, 2.779, 2.771, 2.763, 2.756, 2.750,
    ),
}

# Normal-limit quantiles used for df > 30.
_Z_LIMIT = {0.90: 1.645, 0.95: 1.960, 0.99: 2.576}


def _confidence_key(confidence: float) -> float:
    for key in _T_TABLE:
        if abs(confidence - key) < 1e-9:
            return key
    raise ValueError(
        f"unsupported confidence level {confidence}; "
        f"available: {sorted(_T_TABLE)}"
    )


def t_critical(df: int, confidence: float = 0.95) -> float:
    """Two-sided critical value of Student's t."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    key = _confidence_key(confidence)
    if df <= 30:
        return _T_TABLE[key][df - 1]
    return _Z_LIMIT[key]


def variation_pct(samples) -> float:
    """Spread of the samples relative to their mean: (max - min) / mean * 100."""
    values = [float(x) for x in samples]
    if len(values) < 2:
        raise InsufficientSamplesError(
            f"variation needs at least 2 samples, got {len(values)}"
        )
    mean = math.fsum(values) / len(values)
    if mean == 0.0:
        raise UndefinedVariationError("variation is undefined for zero mean")
    return (max(values) - min(values)) / mean * 100.0


@dataclass(frozen=True)
class CampaignSummary:
    """Summary of n repeated energy measurements of the same workload."""

    samples: tuple[float, ...]
    n: int
    mean_j: float
    sd_j: float
    me_j: float
    ci: tuple[float, float]
    variation_pct: float
    confidence: float

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "samples": list(self.samples),
            "mean_j": self.mean_j,
            "sd_j": self.sd_j,
            "me_j": self.me_j,
            "ci": [self.ci[0], self.ci[1]],
            "variation_pct": self.variation_pct,
            "confidence": self.confidence,
        }

    def to_csv_row(self) -> str:
        """One CSV line: the samples in order, then mean, then margin of error.

        Values are displayed at 5 significant digits; stored fields keep
        full precision.
        """
        cells = [format_sig5(x) for x in self.samples]
        cells.append(format_sig5(self.mean_j))
        cells.append(format_sig5(self.me_j))
        return ",".join(cells)


def format_sig5(x: float) -> str:
    """Format to 5 significant digits, keeping trailing zeros."""
    return "%#.5g" % x


def summarize_campaign(samples, confidence: float = 0.95) -> CampaignSummary:
    """Mean, sample standard deviation (n-1 denominator) and margin of error.

    me = t_critical(n - 1, confidence) * sd / sqrt(n)
    """
    values = [float(x) for x in samples]
    n = len(values)
    if n < 2:
        raise InsufficientSamplesError(
            f"campaign summary needs at least 2 samples, got {n}"
        )
    if not all(math.isfinite(x) for x in values):
        raise ValueError("campaign samples must be finite")
    mean = math.fsum(values) / n
    sd = math.sqrt(math.fsum((x - mean) ** 2 for x in values) / (n - 1))
    me = t_critical(n - 1, confidence) * sd / math.sqrt(n)
    return CampaignSummary(
        samples=tuple(values),
        n=n,
        mean_j=mean,
        sd_j=sd,
        me_j=me,
        ci=(mean - me, mean + me),
        variation_pct=variation_pct(values) if mean != 0.0 else math.nan,
        confidence=confidence,
    )

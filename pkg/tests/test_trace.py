import math

import numpy as np
import pytest

from joulemark.trace import (
    MeasurementWindow,
    PowerTrace,
    ShuntConfig,
    TraceFormatError,
    downsample,
    index_at_or_after,
    power_to_shunt_volts,
    read_trace_csv,
    sample_to_power,
    validate_trace,
    write_trace_csv,
)


class TestShuntConfig:
    def test_defaults_are_12v_supply_and_100mohm_shunt(self):
        shunt = ShuntConfig()
        assert shunt.vf == 12.0
        assert shunt.rs == 0.1

    @pytest.mark.parametrize("vf,rs", [(0.0, 0.1), (-1.0, 0.1), (12.0, 0.0), (12.0, -0.1)])
    def test_rejects_non_positive_values(self, vf, rs):
        with pytest.raises(ValueError):
            ShuntConfig(vf=vf, rs=rs)


class TestSampleToPower:
    def test_100mv_drop_is_one_amp_hence_12_watts(self):
        assert sample_to_power(0.1, ShuntConfig()) == pytest.approx(12.0, rel=1e-12)

    def test_zero_volts_is_zero_watts(self):
        assert sample_to_power(0.0, ShuntConfig()) == 0.0

    def test_linear_half_drop_half_power(self):
        assert sample_to_power(0.05, ShuntConfig()) == pytest.approx(6.0, rel=1e-12)

    def test_homogeneous_in_vs(self):
        rng = np.random.default_rng(7)
        shunt = ShuntConfig()
        for _ in range(200):
            vs = rng.uniform(-1, 1)
            k = rng.uniform(-100, 100)
            assert sample_to_power(k * vs, shunt) == pytest.approx(
                k * sample_to_power(vs, shunt), rel=1e-12, abs=1e-15
            )

    def test_round_trips_with_inverse(self):
        shunt = ShuntConfig(vf=5.0, rs=0.25)
        p = np.array([0.0, 1.5, 9.0, 15.0])
        assert sample_to_power(power_to_shunt_volts(p, shunt), shunt) == pytest.approx(p)


class TestMeasurementWindow:
    def test_rejects_inverted_or_negative_bounds(self):
        with pytest.raises(ValueError):
            MeasurementWindow(5, 5)
        with pytest.raises(ValueError):
            MeasurementWindow(7, 3)
        with pytest.raises(ValueError):
            MeasurementWindow(-1, 3)

    def test_duration(self):
        assert MeasurementWindow(100, 300).duration_s(20_000.0) == pytest.approx(0.01)


class TestValidateTrace:
    def test_accepts_finite_single_channel_trace(self):
        trace = PowerTrace(rate_hz=40_000.0, vs=np.zeros(100))
        assert validate_trace(trace).ok

    def test_flags_non_finite_sample_with_its_index(self):
        vs = np.zeros(20)
        vs[7] = np.nan
        result = validate_trace(PowerTrace(rate_hz=40_000.0, vs=vs))
        assert not result.ok
        assert any(v.index == 7 for v in result.violations)

    def test_flags_non_positive_rate(self):
        result = validate_trace(PowerTrace(rate_hz=0.0, vs=np.zeros(10)))
        assert any("non-positive rate" in str(v) for v in result.violations)

    def test_flags_empty_trace(self):
        result = validate_trace(PowerTrace(rate_hz=40_000.0, vs=np.zeros(0)))
        assert not result.ok

    def test_flags_channel_length_mismatch(self):
        trace = PowerTrace(rate_hz=40_000.0, vs=np.zeros(10), trig=np.zeros(9))
        assert not validate_trace(trace).ok


class TestPowerTrace:
    def test_arrays_are_read_only(self):
        trace = PowerTrace(rate_hz=40_000.0, vs=np.zeros(10))
        with pytest.raises(ValueError):
            trace.vs[0] = 1.0

    def test_sample_accessors(self):
        trace = PowerTrace(rate_hz=10.0, vs=np.array([0.1, 0.2]), trig=np.array([0.0, 1.8]))
        s = trace.sample(1)
        assert (s.index, s.vs, s.trig) == (1, 0.2, 1.8)
        assert [p.index for p in trace.itersamples()] == [0, 1]

    def test_times_follow_index_over_rate(self):
        trace = PowerTrace(rate_hz=20_000.0, vs=np.zeros(5))
        assert trace.times_s() == pytest.approx(np.arange(5) / 20_000.0)


class TestDownsample:
    def test_keeps_every_factor_th_sample_from_zero(self):
        trace = PowerTrace(rate_hz=200_000.0, vs=np.arange(10, dtype=float))
        out = downsample(trace, 5)
        assert out.vs.tolist() == [0.0, 5.0]
        assert out.rate_hz == pytest.approx(40_000.0)

    def test_factor_one_is_identity(self):
        trace = PowerTrace(rate_hz=200_000.0, vs=np.arange(10, dtype=float))
        out = downsample(trace, 1)
        assert np.array_equal(out.vs, trace.vs)
        assert out.rate_hz == trace.rate_hz

    def test_extreme_decimation_preserves_ramp_endpoints(self):
        # oracle: decimation by definition keeps indices {0, 5000, 10000}
        ramp = np.linspace(0.0, 0.1, 10_001)
        trace = PowerTrace(rate_hz=200_000.0, vs=ramp)
        out = downsample(trace, 5_000)
        assert len(out) == 3
        assert out.vs.tolist() == [ramp[0], ramp[5_000], ramp[10_000]]

    def test_composition_equals_combined_factor(self):
        rng = np.random.default_rng(11)
        vs = rng.normal(size=1000)
        trace = PowerTrace(rate_hz=100_000.0, vs=vs)
        for a, b in [(2, 5), (4, 10), (3, 7)]:
            two_step = downsample(downsample(trace, a), b)
            one_step = downsample(trace, a * b)
            assert np.array_equal(two_step.vs, one_step.vs)
            assert two_step.rate_hz == pytest.approx(one_step.rate_hz)

    def test_rejects_bad_factors(self):
        trace = PowerTrace(rate_hz=10.0, vs=np.zeros(10))
        with pytest.raises(ValueError):
            downsample(trace, 0)
        with pytest.raises(ValueError):
            downsample(trace, 11)

    def test_keeps_trigger_channel(self):
        trace = PowerTrace(
            rate_hz=10.0, vs=np.arange(10, dtype=float), trig=np.arange(10, dtype=float)
        )
        out = downsample(trace, 2)
        assert out.trig.tolist() == [0.0, 2.0, 4.0, 6.0, 8.0]


class TestIndexAtOrAfter:
    def test_on_grid_times_map_exactly(self):
        assert index_at_or_after(1.0, 20_000.0) == 20_000
        # 0.3 * 20000 rounds up to 6000.000000000001 in floats
        assert index_at_or_after(0.3, 20_000.0) == 6_000

    def test_between_grid_times_round_up(self):
        assert index_at_or_after(1.00001, 20_000.0) == 20_001
        assert index_at_or_after(-0.5, 20_000.0) == 0


class TestTraceCsv:
    def _trace(self, with_trigger: bool) -> PowerTrace:
        rng = np.random.default_rng(3)
        n = 257
        trig = rng.choice([0.0, 1.8], size=n) if with_trigger else None
        return PowerTrace(
            rate_hz=40_000.0,
            vs=rng.uniform(-0.001, 0.1, size=n),
            trig=trig,
            shunt=ShuntConfig(vf=12.0, rs=0.1),
        )

    @pytest.mark.parametrize("with_trigger", [False, True])
    def test_round_trip(self, tmp_path, with_trigger):
        trace = self._trace(with_trigger)
        path = tmp_path / "t.csv"
        write_trace_csv(trace, path)
        back = read_trace_csv(path)
        assert back.rate_hz == trace.rate_hz
        assert back.shunt == trace.shunt
        assert np.array_equal(back.vs, trace.vs)
        if with_trigger:
            assert np.array_equal(back.trig, trace.trig)
        else:
            assert back.trig is None

    def test_rewrite_is_byte_identical(self, tmp_path):
        trace = self._trace(True)
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        write_trace_csv(trace, a)
        write_trace_csv(read_trace_csv(a), b)
        assert a.read_bytes() == b.read_bytes()

    def test_rejects_unknown_header(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("# rate_hz=10\n# vf=12\n# rs=0.1\ntime,volts\n")
        with pytest.raises(TraceFormatError) as err:
            read_trace_csv(path)
        assert err.value.line == 4

    def test_rejects_missing_preamble_key(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("# rate_hz=10\n# vf=12\nt_s,vs_v\n0.0,0.0\n")
        with pytest.raises(TraceFormatError, match="rs"):
            read_trace_csv(path)

    def test_rejects_off_grid_timestamp(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text(
            "# rate_hz=10.0\n# vf=12.0\n# rs=0.1\nt_s,vs_v\n0.0,0.0\n0.2,0.0\n"
        )
        with pytest.raises(TraceFormatError) as err:
            read_trace_csv(path)
        assert err.value.line == 6

    def test_rejects_non_numeric_cell(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text(
            "# rate_hz=10.0\n# vf=12.0\n# rs=0.1\nt_s,vs_v\n0.0,zap\n"
        )
        with pytest.raises(TraceFormatError) as err:
            read_trace_csv(path)
        assert err.value.line == 5

    def test_rejects_wrong_column_count(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text(
            "# rate_hz=10.0\n# vf=12.0\n# rs=0.1\nt_s,vs_v\n0.0,0.0,1.8\n"
        )
        with pytest.raises(TraceFormatError, match="columns"):
            read_trace_csv(path)

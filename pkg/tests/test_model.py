import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hybrid_cycle.model import (
    ModelParams,
    RawParams,
    RegimeSchedule,
    ValidationError,
    delta_at,
    load_config,
    normalize,
    params_from_mapping,
    segment_boundaries,
)


def raw(**kw):
    values = dict(a=1.0, b=1.0, q=0.8, xi=0.5, delta1=0.5, delta2=1.5, r=0.03, z0=0.0, alpha=0.5, T=1.0)
    values.update(kw)
    return RawParams(**values)


class TestNormalize:
    def test_figure_parameters(self):
        # xi must lie strictly inside (0, 1); beta = 0.8 is reached with q = 1.6, xi = 0.5
        p = normalize(raw(q=1.6, xi=0.5))
        assert p.beta == pytest.approx(0.8)
        assert p.x0 == 0.0
        assert p.t_s == 0.5
        assert (p.rho1, p.rho2) == (0.53, 1.53)

    def test_arithmetic(self):
        p = normalize(raw(a=2, b=3, q=6, xi=0.5, z0=9))
        assert p.beta == pytest.approx(0.5)
        assert p.x0 == pytest.approx(3.0)

    def test_rejects_equal_rates(self):
        with pytest.raises(ValidationError) as exc:
            raw(delta1=1.0, delta2=1.0)
        assert exc.value.field == "delta2"

    @pytest.mark.parametrize(
        "field,value",
        [("a", 0), ("b", -1), ("q", 0), ("xi", 1.0), ("xi", 0.0), ("alpha", 1.0), ("z0", -0.1), ("T", 0), ("r", float("nan"))],
    )
    def test_field_validation_names_field(self, field, value):
        with pytest.raises(ValidationError) as exc:
            raw(**{field: value})
        assert exc.value.field == field

    @given(
        st.floats(0.1, 10),
        st.floats(0.1, 10),
        st.floats(0.1, 10),
        st.floats(0.01, 0.99),
        st.floats(0, 10),
        st.floats(0.1, 100),
    )
    def test_scale_consistency(self, a, b, q, xi, z0, factor):
        p1 = normalize(raw(a=a, b=b, q=q, xi=xi, z0=z0))
        p2 = normalize(raw(a=a * factor, b=b, q=q * factor, xi=xi, z0=z0))
        assert p2.beta == pytest.approx(p1.beta, rel=1e-12)
        assert p2.x0 == pytest.approx(p1.x0, rel=1e-12, abs=1e-300)


class TestModelParams:
    def test_derived_rates_exact(self):
        p = ModelParams(beta=1, delta1=0.7, delta2=0.2, r=0.05, t_s=0.3)
        assert p.rho1 == 0.05 + 0.7
        assert p.rho2 == 0.05 + 0.2

    @pytest.mark.parametrize("t_s", [0.0, 1.0, 1.5, -0.1])
    def test_switch_inside_period(self, t_s):
        with pytest.raises(ValidationError):
            ModelParams(beta=1, delta1=0.5, delta2=1.5, r=0.03, t_s=t_s)

    def test_frozen(self):
        p = ModelParams(beta=1, delta1=0.5, delta2=1.5, r=0.03, t_s=0.5)
        with pytest.raises(AttributeError):
            p.beta = 2


SCHED = RegimeSchedule(t_s=0.5, T=1.0, delta1=0.5, delta2=1.5)


class TestDeltaAt:
    @pytest.mark.parametrize("t,expected", [(0.25, 0.5), (0.5, 1.5), (7.8, 1.5), (0.0, 0.5), (3.0, 0.5)])
    def test_values(self, t, expected):
        assert delta_at(SCHED, t) == expected

    @given(st.floats(0, 1, exclude_max=True), st.integers(0, 100))
    def test_periodic(self, t, k):
        # exact boundary hits after adding kT can round either way; avoid them
        if abs(t - 0.5) < 1e-9 or t > 1 - 1e-9:
            return
        assert delta_at(SCHED, t) == delta_at(SCHED, t + k)


class TestSegmentBoundaries:
    def test_unit_period(self):
        assert segment_boundaries(SCHED, 2) == [(0, 1), (0.5, 2), (1, 1), (1.5, 2), (2, 1)]

    def test_short_first_regime(self):
        s = RegimeSchedule(0.2, 1.0, 0.5, 1.5)
        assert segment_boundaries(s, 1) == [(0, 1), (0.2, 2), (1, 1)]

    def test_overshoot_to_next_boundary(self):
        s = RegimeSchedule(0.5, 2.0, 0.5, 1.5)
        assert segment_boundaries(s, 3) == [(0, 1), (0.5, 2), (2, 1), (2.5, 2), (4, 1)]

    @given(st.floats(0.05, 0.95), st.floats(0.5, 3), st.floats(0.1, 30))
    def test_alternating_gaps(self, frac, T, horizon):
        s = RegimeSchedule(frac * T, T, 0.5, 1.5)
        b = segment_boundaries(s, horizon)
        assert b[-1][0] >= horizon and b[-2][0] < horizon
        gaps = [b2[0] - b1[0] for b1, b2 in zip(b, b[1:])]
        for i, g in enumerate(gaps):
            expected = s.t_s if i % 2 == 0 else T - s.t_s
            assert g == pytest.approx(expected, rel=1e-9)
        assert [r for _, r in b] == [1 + i % 2 for i in range(len(b))]


class TestConfig:
    def test_normalized_block(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"normalized": {"beta": 0.8, "delta1": 0.5, "delta2": 1.5, "r": 0.03, "t_s": 0.5}}))
        p = params_from_mapping(load_config(path))
        assert p.beta == 0.8 and p.T == 1.0

    def test_raw_block(self):
        doc = {"raw": dict(a=2, b=3, q=6, xi=0.5, z0=9, delta1=0.5, delta2=1.5, r=0.03)}
        p = params_from_mapping(doc)
        assert p.beta == pytest.approx(0.5)

    @pytest.mark.parametrize("doc", [{}, {"raw": {}, "normalized": {}}])
    def test_exactly_one_block(self, doc):
        with pytest.raises(ValidationError):
            params_from_mapping(doc)

    def test_unknown_key(self):
        with pytest.raises(ValidationError) as exc:
            params_from_mapping({"normalized": {"beta": 1, "gamma": 2}})
        assert exc.value.field == "gamma"

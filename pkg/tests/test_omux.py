import numpy as np
import pytest
from hypothesis import given, strategies as st

from carrier_forge.omux import (
    FilterCharacteristic,
    SlopePair,
    carrier_slopes,
    default_characteristic,
    fit_slopes,
    normalize_slopes,
    read_characteristic,
    write_characteristic,
)

F = np.linspace(-400, 400, 321)


def linear_char(g=0.02, d=-0.1, g0=0.0, d0=0.0):
    return FilterCharacteristic(F, g0 + g * F, d0 + d * F)


def test_flat_gives_zero():
    s = fit_slopes(FilterCharacteristic(F, np.zeros_like(F), np.full_like(F, 5.0)), 10.0, 150.0)
    assert s.g == 0.0 and s.d == 0.0


@pytest.mark.parametrize("f0,b", [(0, 100), (-150, 200), (250, 40)])
def test_linear_exact(f0, b):
    s = fit_slopes(linear_char(), f0, b)
    assert s.g == pytest.approx(0.02, abs=1e-12)
    assert s.d == pytest.approx(-0.1, abs=1e-12)
    assert s.fit_band == (f0 - b / 2, f0 + b / 2)


@given(st.floats(-5, 5), st.floats(-20, 20), st.floats(-200, 200), st.floats(20, 300))
def test_affine_shift_invariance(g0, d0, f0, b):
    ch = default_characteristic()
    s1 = fit_slopes(ch, f0, b)
    s2 = fit_slopes(FilterCharacteristic(ch.freq_mhz, ch.gain_db + g0, ch.group_delay_ns + d0), f0, b)
    assert s2.g == pytest.approx(s1.g, rel=1e-9, abs=1e-12)
    assert s2.d == pytest.approx(s1.d, rel=1e-9, abs=1e-12)


def test_golden_dataset_values():
    ch = default_characteristic()
    assert ch.support == (-750.0, 750.0)
    s = fit_slopes(ch, -150.0, 200.0)
    assert s.g == pytest.approx(0.000150444938, rel=1e-8)
    assert s.d == pytest.approx(-0.008978168, rel=1e-7)


def test_dataset_shape():
    # flat middle, losses and delay flare at the edges
    ch = default_characteristic()
    assert abs(ch.gain_at(0.0)) < 1e-12
    assert ch.gain_at(300.0) < -1.0 and ch.gain_at(-300.0) < -1.0
    assert ch.delay_at(240.0) > ch.delay_at(0.0)
    centre = fit_slopes(ch, 0.0, 150.0)
    edge = fit_slopes(ch, 150.0, 198.8)
    assert abs(edge.d) > 10 * abs(centre.d)


def test_normalization():
    assert normalize_slopes(0.01, 0.0, 120.48)[0] == pytest.approx(1.2048)
    assert normalize_slopes(0.0, 0.05, 180.72)[1] == pytest.approx(1633.0, abs=0.02)
    assert normalize_slopes(0.0, 0.3, 77.0)[0] == 0.0
    with pytest.raises(ValueError):
        normalize_slopes(0.1, 0.1, 0.0)
    s = carrier_slopes(linear_char(), 0.0, 120.0, 100.0)
    assert (s.x_g, s.y_d) == pytest.approx((2.0, -1000.0))


def test_flipped():
    s = SlopePair(0.1, 0.2, 1.0, 2.0).flipped(gain=True)
    assert (s.g, s.d, s.x_g, s.y_d) == (-0.1, 0.2, -1.0, 2.0)


def test_csv_roundtrip(tmp_path):
    ch = linear_char(0.013, 0.07)
    p = tmp_path / "o.csv"
    write_characteristic(ch, p)
    back = read_characteristic(p)
    assert np.allclose(back.gain_db, ch.gain_db, rtol=1e-8)
    assert np.allclose(back.group_delay_ns, ch.group_delay_ns, rtol=1e-8)


def test_bad_inputs(tmp_path):
    with pytest.raises(ValueError):
        FilterCharacteristic(F[::-1], F, F)
    with pytest.raises(ValueError):
        FilterCharacteristic(F[:5], F[:5], F[:5])
    with pytest.raises(ValueError):
        fit_slopes(linear_char(), 390.0, 100.0)  # leaves the support
    with pytest.raises(ValueError):
        fit_slopes(linear_char(), 0.0, 10.0)  # fewer than 8 native points
    p = tmp_path / "bad.csv"
    p.write_text("f,g,d\n1,2,3\n")
    with pytest.raises(ValueError):
        read_characteristic(p)

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from regen_turboshaft.atmosphere import (
    CP_AIR_COEFFS,
    CP_T_MAX,
    CP_T_MIN,
    R_AIR,
    ambient_conditions,
    cp_air,
    flight_velocity,
    k_air,
    mean_cp_air,
    n2_saturation_temperature,
)
from regen_turboshaft.errors import DomainError


def isa_oracle(H):
    """Textbook ISA written out independently of the package."""
    g0, R, L = 9.80665, 287.05287, 0.0065
    if H <= 11000:
        T = 288.15 - L * H
        return T, 101.325 * (T / 288.15) ** (g0 / (L * R))
    T11 = 216.65
    P11 = 101.325 * (T11 / 288.15) ** (g0 / (L * R))
    return T11, P11 * math.exp(-g0 * (H - 11000) / (R * T11))


def test_sea_level():
    amb = ambient_conditions(0.0)
    assert amb.T1 == 288.15
    assert amb.P1 == pytest.approx(101.325, rel=1e-12)
    assert amb.rho == pytest.approx(1.225, rel=1e-3)


def test_4000_m_matches_formula_and_table():
    amb = ambient_conditions(4000.0)
    T, P = isa_oracle(4000.0)
    assert amb.T1 == pytest.approx(262.15, abs=1e-12)
    assert amb.P1 == pytest.approx(P, rel=1e-12)
    assert amb.P1 == pytest.approx(61.640, abs=5e-3)  # published table value
    assert amb.rho == pytest.approx(0.819, abs=1e-3)


def test_tropopause_and_stratosphere():
    assert ambient_conditions(11000.0).T1 == pytest.approx(216.65, abs=1e-9)
    for H in (12000.0, 15000.0, 20000.0):
        T, P = isa_oracle(H)
        amb = ambient_conditions(H)
        assert amb.T1 == pytest.approx(T)
        assert amb.P1 == pytest.approx(P, rel=1e-12)


def test_continuous_at_11_km():
    below, above = ambient_conditions(11000.0 - 1e-7), ambient_conditions(11000.0 + 1e-7)
    assert above.T1 == pytest.approx(below.T1, rel=1e-6)
    assert above.P1 == pytest.approx(below.P1, rel=1e-6)


@pytest.mark.parametrize("H", [-1.0, 20000.1, float("nan")])
def test_altitude_out_of_range(H):
    with pytest.raises(DomainError):
        ambient_conditions(H)


@given(st.floats(0.0, 20000.0))
def test_ambient_invariants(H):
    amb = ambient_conditions(H)
    assert amb.T1 > 0 and amb.P1 > 0
    assert amb.rho == pytest.approx(amb.P1 * 1000.0 / (R_AIR * 1000.0 * amb.T1), rel=1e-9)
    assert amb.a_sound == pytest.approx(math.sqrt(k_air(amb.T1) * R_AIR * 1000.0 * amb.T1), rel=1e-9)


@pytest.mark.parametrize("T", [300.0, 1000.0])
def test_cp_polynomial(T):
    a1, a2, a3, a4 = 0.99963438, -0.055205312e-3, 0.346320281e-6, -0.140118997e-9
    assert cp_air(T) == pytest.approx(a1 + a2 * T + a3 * T**2 + a4 * T**3, rel=1e-12)


def test_cp_spot_values_and_constant_term():
    assert CP_AIR_COEFFS[0] == 0.99963438
    assert cp_air(300.0) == pytest.approx(1.0105, abs=1e-4)
    assert cp_air(1000.0) == pytest.approx(1.1506, abs=1e-4)


@pytest.mark.parametrize("T", [CP_T_MIN - 1.0, CP_T_MAX + 1.0])
def test_cp_window(T):
    with pytest.raises(DomainError):
        cp_air(T)


def cp_turning_point():
    _, a2, a3, a4 = CP_AIR_COEFFS
    roots = np.roots([3 * a4, 2 * a3, a2])
    return max(r.real for r in roots)


def test_cp_increasing_up_to_its_maximum():
    T_peak = cp_turning_point()
    assert 1560.0 < T_peak < 1570.0
    T = np.linspace(250.0, T_peak - 1e-6, 2000)
    assert np.all(np.diff([cp_air(t) for t in T]) > 0)


def test_cp_turns_over_above_its_maximum():
    T_peak = cp_turning_point()
    assert cp_air(1700.0) < cp_air(T_peak)
    assert cp_air(2500.0) < cp_air(1700.0)


def test_mean_cp():
    assert mean_cp_air(300.0, 300.0) == cp_air(300.0)
    assert mean_cp_air(300.0, 500.0) == cp_air(400.0)
    assert mean_cp_air(600.0, 1400.0) == pytest.approx(1.1506, abs=1e-4)


def test_k_spot_values():
    assert k_air(300.0) == pytest.approx(1.3967, abs=2e-4)
    assert k_air(1000.0) == pytest.approx(1.3323, abs=2e-4)


@given(st.floats(CP_T_MIN, 2300.0))
def test_k_bounds(T):
    cp = cp_air(T)
    assert 1.0 < k_air(T) < 1.41
    assert k_air(T) == pytest.approx(cp / (cp - R_AIR), rel=1e-15)


def test_k_rises_where_cp_turns_over():
    # the falling cubic drives k past 1.41 near 2318 K; cycle temperatures stay far below
    assert k_air(2310.0) < 1.41 < k_air(2330.0)


def test_flight_velocity():
    amb0 = ambient_conditions(0.0)
    assert flight_velocity(0.0, amb0) == 0.0
    assert flight_velocity(1.0, amb0) == pytest.approx(340.3, abs=0.5)
    amb = ambient_conditions(4000.0)
    expected = 0.5 * math.sqrt(k_air(262.15) * 287.0 * 262.15)
    assert flight_velocity(0.5, amb) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(DomainError):
        flight_velocity(-0.1, amb)


# (P kPa, T K) from the NIST WebBook saturation table for nitrogen
N2_TABLE = [
    (38.545, 70.0),
    (101.325, 77.355),
    (229.03, 85.0),
    (540.82, 95.0),
    (1084.1, 105.0),
    (1940.3, 115.0),
    (2513.0, 120.0),
]


@pytest.mark.parametrize("P,T", N2_TABLE)
def test_n2_saturation_against_table(P, T):
    assert n2_saturation_temperature(P) == pytest.approx(T, abs=0.25)


def test_n2_saturation_examples():
    assert n2_saturation_temperature(101.325) == pytest.approx(77.36, abs=0.05)
    assert n2_saturation_temperature(500.0) == pytest.approx(94.0, abs=1.0)


@pytest.mark.parametrize("P", [10.0, 3500.0])
def test_n2_saturation_range(P):
    with pytest.raises(DomainError):
        n2_saturation_temperature(P)


def test_n2_saturation_increasing():
    P = np.linspace(20.0, 3000.0, 500)
    assert np.all(np.diff([n2_saturation_temperature(p) for p in P]) > 0)

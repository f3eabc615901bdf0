"""Ambient flight conditions and gas properties.

The atmosphere is the 1976 International Standard Atmosphere up to 20 km
(linear-lapse troposphere, isothermal lower stratosphere). Air is an ideal
gas with a temperature-dependent cp given by a cubic polynomial in kJ/kg-K.
"""

import math
from dataclasses import dataclass

from .errors import DomainError

R_AIR = 0.287  # kJ/kg-K
R_UNIVERSAL = 8.314462618  # kJ/kmol-K

# ISA 1976 constants
T0_ISA = 288.15  # K
P0_ISA = 101.325  # kPa
LAPSE_TROPO = 0.0065  # K/m
H_TROPOPAUSE = 11000.0  # m
H_MAX = 20000.0  # m
G0 = 9.80665  # m/s^2
R_ISA = 287.05287  # J/kg-K, the value the standard tables are built on

# cp_air = a1 + a2*T + a3*T^2 + a4*T^3, kJ/kg-K
CP_AIR_COEFFS = (0.99963438, -0.055205312e-3, 0.346320281e-6, -0.140118997e-9)
CP_T_MIN = 150.0  # covers inlet air cooled down to the 150 K floor
CP_T_MAX = 2500.0  # the cubic turns over at high T; no extrapolation

# Nitrogen saturation: log10(P/kPa) = A - B/(T + C). Least-squares fit to the
# NIST WebBook saturation table 65-120 K (see tools/generate_property_data.py);
# reproduces the normal boiling point 77.355 K within 0.05 K.
N2_ANTOINE = (5.8306969014, 285.5795235293, -2.7368254093)
N2_P_MIN = 20.0  # kPa
N2_P_MAX = 3000.0  # kPa, below the 3396 kPa critical pressure

M_N2 = 28.0134  # kg/kmol
R_N2 = R_UNIVERSAL / M_N2


@dataclass(frozen=True)
class AmbientState:
    T1: float  # K
    P1: float  # kPa
    rho: float  # kg/m^3
    a_sound: float  # m/s


@dataclass(frozen=True)
class GasProps:
    cp: float  # kJ/kg-K
    k: float
    R_specific: float  # kJ/kg-K


def ambient_conditions(H):
    """ISA static conditions at geometric altitude ``H`` (m), 0-20 km."""
    if not (0.0 <= H <= H_MAX) or not math.isfinite(H):
        raise DomainError(f"altitude {H} m outside ISA model range [0, {H_MAX:.0f}] m")
    exponent = G0 / (R_ISA * LAPSE_TROPO)
    T_trop = T0_ISA - LAPSE_TROPO * H_TROPOPAUSE
    if H <= H_TROPOPAUSE:
        T = T0_ISA - LAPSE_TROPO * H
        P = P0_ISA * (T / T0_ISA) ** exponent
    else:
        P_trop = P0_ISA * (T_trop / T0_ISA) ** exponent
        T = T_trop
        P = P_trop * math.exp(-G0 * (H - H_TROPOPAUSE) / (R_ISA * T_trop))
    rho = P * 1000.0 / (R_AIR * 1000.0 * T)
    a = math.sqrt(k_air(T) * R_AIR * 1000.0 * T)
    return AmbientState(T1=T, P1=P, rho=rho, a_sound=a)


def _check_cp_window(T):
    if not (CP_T_MIN <= T <= CP_T_MAX):
        raise DomainError(f"temperature {T} K outside cp polynomial window [{CP_T_MIN}, {CP_T_MAX}] K")


def cp_air(T):
    """Specific heat of air at constant pressure, kJ/kg-K."""
    _check_cp_window(T)
    a1, a2, a3, a4 = CP_AIR_COEFFS
    return a1 + T * (a2 + T * (a3 + T * a4))


def mean_cp_air(T_a, T_b):
    """cp of air evaluated at the arithmetic mean of two temperatures."""
    _check_cp_window(T_a)
    _check_cp_window(T_b)
    return cp_air(0.5 * (T_a + T_b))


def k_air(T):
    cp = cp_air(T)
    return cp / (cp - R_AIR)


def air_props(T):
    cp = cp_air(T)
    return GasProps(cp=cp, k=cp / (cp - R_AIR), R_specific=R_AIR)


def flight_velocity(Ma, amb):
    """Flight speed from Mach number and the ambient speed of sound, m/s."""
    if Ma < 0 or not math.isfinite(Ma):
        raise DomainError(f"Mach number must be non-negative, got {Ma}")
    return Ma * amb.a_sound


def n2_saturation_temperature(P):
    """Boiling temperature of nitrogen (K) at pressure ``P`` (kPa)."""
    if not (N2_P_MIN <= P <= N2_P_MAX):
        raise DomainError(f"pressure {P} kPa outside N2 saturation correlation range [{N2_P_MIN}, {N2_P_MAX}] kPa")
    A, B, C = N2_ANTOINE
    return B / (A - math.log10(P)) - C

"""Nitrogen Rankine accessory cycle, stations c1-c6, plus the fuel pump.

c6 pump inlet (saturated liquid) -> c1 pump exit -> hex1 (cools inlet air)
-> c2 -> turbine 2 -> c3 -> hex2 (recovers exhaust heat) -> c4 -> turbine 3
-> c5 -> hex3 (condensed against the liquid-hydrogen fuel) -> c6.

The vapor is an ideal gas with constant cp; the liquid only appears at the
pump. Pressures in kPa, temperatures in K, powers and heat rates in kW.
"""

from dataclasses import dataclass

from .atmosphere import R_N2, n2_saturation_temperature
from .errors import DomainError, InfeasibleError

CP_N2_VAPOR = 1.04  # kJ/kg-K
CP_N2_LIQUID = 2.04  # kJ/kg-K
RHO_N2_LIQUID = 808.0  # kg/m^3 near the normal boiling point
RHO_H2_LIQUID = 70.8  # kg/m^3


@dataclass(frozen=True)
class CoolantStation:
    T: float
    P: float
    phase: str  # "liquid" or "vapor"


@dataclass(frozen=True)
class AccessoryResult:
    c1: CoolantStation
    c2: CoolantStation
    c3: CoolantStation
    c4: CoolantStation
    c5: CoolantStation
    c6: CoolantStation
    W_PC: float
    W_T2: float
    W_T3: float
    W_pf: float
    Q1: float
    Q2: float
    Q3: float
    W_net2: float
    m_c: float
    sink_utilization: float


def k_n2(cp=CP_N2_VAPOR):
    return cp / (cp - R_N2)


def cooling_pump(c6, CR, m_c, eta_pc, d_c, cp_liquid=CP_N2_LIQUID):
    """Pump saturated liquid from c6 by pressure ratio ``CR``.

    Returns (c1, W_PC). The pump work ends up as sensible heat in the liquid.
    """
    if CR < 1:
        raise DomainError(f"accessory compression ratio must be >= 1, got {CR}")
    if not (0 < eta_pc <= 1):
        raise DomainError(f"pump efficiency must be in (0, 1], got {eta_pc}")
    if d_c <= 0:
        raise DomainError("coolant density must be positive")
    W_PC = m_c * c6.P * (CR - 1.0) / (eta_pc * d_c)
    dT = W_PC / (m_c * cp_liquid) if m_c > 0 else 0.0
    return CoolantStation(T=c6.T + dT, P=CR * c6.P, phase="liquid"), W_PC


def hex1_cold_side(c1, Q1, m_c, dP_ch1, T_air_out, cp=CP_N2_VAPOR):
    """Coolant exit of the inlet-air cooler.

    ``T_air_out`` is the cooled-air temperature T2; the coolant must leave
    strictly colder than it.
    """
    if Q1 < 0:
        raise DomainError(f"hex1 duty must be >= 0, got {Q1}")
    T_c2 = c1.T + Q1 / (m_c * cp) if Q1 > 0 else c1.T
    if T_c2 >= T_air_out:
        raise InfeasibleError("hex1", f"coolant exit {T_c2:.2f} K not below cooled air {T_air_out:.2f} K (pinch)")
    P_c2 = c1.P - dP_ch1
    if P_c2 <= 0:
        raise InfeasibleError("hex1", "pressure drop exceeds coolant pressure")
    return CoolantStation(T=T_c2, P=P_c2, phase="vapor")


def turbine2(c2, TF_T2, m_c, eta_T2=1.0, cp=CP_N2_VAPOR):
    """Expand through turbine 2 with outlet/inlet temperature fraction ``TF_T2``.

    The exit pressure follows the isentropic relation for the given fraction;
    with ``eta_T2 < 1`` only that share of the ideal temperature drop is
    realized. Returns (c3, W_T2).
    """
    if not (0 < TF_T2 <= 1):
        raise DomainError(f"temperature fraction must be in (0, 1], got {TF_T2}")
    if not (0 < eta_T2 <= 1):
        raise DomainError(f"turbine efficiency must be in (0, 1], got {eta_T2}")
    k = k_n2(cp)
    P_c3 = c2.P * TF_T2 ** (k / (k - 1.0))
    T_c3 = c2.T - eta_T2 * (c2.T - TF_T2 * c2.T)
    W_T2 = m_c * cp * (c2.T - T_c3)
    return CoolantStation(T=T_c3, P=P_c3, phase="vapor"), W_T2


def hex2_cold_side(c3, Q2, m_c, dP_ch2, T_gas_in, cp=CP_N2_VAPOR):
    """Coolant exit of the exhaust heat-recovery exchanger."""
    if Q2 < 0:
        raise DomainError(f"hex2 duty must be >= 0, got {Q2}")
    T_c4 = c3.T + Q2 / (m_c * cp) if Q2 > 0 else c3.T
    if T_c4 >= T_gas_in:
        raise InfeasibleError("hex2", f"coolant exit {T_c4:.2f} K not below gas inlet {T_gas_in:.2f} K (pinch)")
    P_c4 = c3.P - dP_ch2
    if P_c4 <= 0:
        raise InfeasibleError("hex2", "pressure drop exceeds coolant pressure")
    return CoolantStation(T=T_c4, P=P_c4, phase="vapor")


def turbine3(c4, P_c5, m_c, eta_T3=1.0, cp=CP_N2_VAPOR):
    """Expand from c4 down to ``P_c5``; returns (c5, W_T3)."""
    if P_c5 > c4.P:
        raise InfeasibleError("turbine3", f"exit pressure {P_c5:.3f} kPa above inlet {c4.P:.3f} kPa")
    if not (0 < eta_T3 <= 1):
        raise DomainError(f"turbine efficiency must be in (0, 1], got {eta_T3}")
    k = k_n2(cp)
    T_c5s = c4.T * (P_c5 / c4.P) ** ((k - 1.0) / k)
    T_c5 = c4.T - eta_T3 * (c4.T - T_c5s)
    W_T3 = m_c * cp * (c4.T - T_c5)
    return CoolantStation(T=T_c5, P=P_c5, phase="vapor"), W_T3


def fuel_sink_capacity(m_f, cp_fuel, dT_fuel, latent_fuel):
    """Heat (kW) the hydrogen stream can absorb while staying below N2 condensation."""
    return m_f * (cp_fuel * dT_fuel + latent_fuel)


def hex3_condenser(c5, m_c, dP_ch3, m_f, sink_capacity_per_kg=None, cp=CP_N2_VAPOR, enforce_sink=False):
    """Cool the turbine-3 exhaust back to the boiling point at the pump inlet.

    Returns (c6, Q3, utilization) where ``utilization`` is Q3 divided by the
    fuel-side heat-sink capacity (``inf`` with no fuel, ``nan`` when no
    capacity is supplied). With ``enforce_sink`` an over-subscribed sink is
    an error.
    """
    P_c6 = c5.P - dP_ch3
    T_c6 = n2_saturation_temperature(P_c6)
    if c5.T < T_c6:
        raise InfeasibleError("hex3", f"turbine-3 exit {c5.T:.2f} K already below boiling point {T_c6:.2f} K")
    Q3 = m_c * cp * (c5.T - T_c6)
    if Q3 > 0 and m_f <= 0:
        raise InfeasibleError("hex3", "condenser duty with no fuel flow to absorb it")
    if sink_capacity_per_kg is None:
        utilization = float("nan")
    elif Q3 == 0:
        utilization = 0.0
    else:
        utilization = Q3 / (m_f * sink_capacity_per_kg)
    if enforce_sink and utilization > 1.0:
        raise InfeasibleError("hex3", f"fuel heat sink over-subscribed (utilization {utilization:.2f})")
    return CoolantStation(T=T_c6, P=P_c6, phase="liquid"), Q3, utilization


def fuel_pump(m_f, P_f1, P_f2, eta_pf, d_f):
    if P_f2 < P_f1:
        raise DomainError("fuel pump outlet pressure below inlet pressure")
    if not (0 < eta_pf <= 1):
        raise DomainError(f"fuel pump efficiency must be in (0, 1], got {eta_pf}")
    if d_f <= 0:
        raise DomainError("fuel density must be positive")
    return m_f * (P_f2 - P_f1) / (eta_pf * d_f)


def net_power_accessory(W_T2, W_T3, W_PC, W_pf):
    return W_T2 + W_T3 - W_PC - W_pf

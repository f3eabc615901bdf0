"""Gas-turbine (main) cycle, stations 1-6.

Station numbering: 1 ambient, 2 after inlet cooling (hex1 air side),
3 compressor exit, 4 turbine inlet, 5 power-turbine exit, 6 recuperator
(hex2) gas-side exit. Temperatures in K, pressures in kPa, powers in kW.

Wherever cp or k depends on an unknown end temperature, it is evaluated at
the arithmetic mean of the end temperatures and the unknown is found by
fixed-point iteration.
"""

from dataclasses import dataclass

from .atmosphere import R_AIR, cp_air, mean_cp_air
from .errors import DomainError, InfeasibleError, SolverError

FP_TOL = 1e-6  # K
FP_MAX_ITER = 100


@dataclass(frozen=True)
class GasStation:
    T: float
    P: float
    mdot: float


@dataclass(frozen=True)
class MainCycleResult:
    st2: GasStation
    st3: GasStation
    st4: GasStation
    st5: GasStation
    st6: GasStation
    W_c1: float
    W_T1: float
    W_net1: float
    Q_h: float
    m_f: float
    Q2: float


def _k_from_cp(cp):
    return cp / (cp - R_AIR)


def inlet_cooling(amb, dT_cool, T_floor=150.0):
    """Air state after the inlet cooler: same pressure, ``dT_cool`` colder.

    The mass flow is left at zero; it depends on the cooled density and is
    set by the caller through :func:`inlet_mass_flow`.
    """
    if dT_cool < 0:
        raise DomainError(f"dT_cool is a cooling magnitude and must be >= 0, got {dT_cool}")
    T2 = amb.T1 - dT_cool
    if T2 <= T_floor:
        raise InfeasibleError("hex1", f"cooled air temperature {T2:.2f} K at or below floor {T_floor:.1f} K")
    return GasStation(T=T2, P=amb.P1, mdot=0.0)


def inlet_mass_flow(density, V, A):
    if density < 0 or V < 0 or A < 0:
        raise DomainError("density, velocity and area must be non-negative")
    return density * V * A


def compressor(st2, r_c1, eta_c1, k=None):
    """Compress ``st2`` by pressure ratio ``r_c1``.

    Returns the exit station and the absorbed power ``W_c1`` (kW). If ``k``
    is given it is held fixed instead of following the mean temperature.
    """
    if r_c1 < 1:
        raise DomainError(f"compressor pressure ratio must be >= 1, got {r_c1}")
    if not (0 < eta_c1 <= 1):
        raise DomainError(f"compressor efficiency must be in (0, 1], got {eta_c1}")
    T2 = st2.T

    def exit_temperature(k_):
        return T2 * (1.0 + (r_c1 ** ((k_ - 1.0) / k_) - 1.0) / eta_c1)

    if k is not None:
        T3 = exit_temperature(k)
    else:
        T3 = exit_temperature(1.4)
        for _ in range(FP_MAX_ITER):
            T3_new = exit_temperature(_k_from_cp(mean_cp_air(T2, T3)))
            if abs(T3_new - T3) < FP_TOL:
                T3 = T3_new
                break
            T3 = T3_new
        else:
            raise SolverError("compressor exit temperature did not converge", abs(T3_new - T3))
    W_c1 = st2.mdot * mean_cp_air(T2, T3) * (T3 - T2)
    return GasStation(T=T3, P=r_c1 * st2.P, mdot=st2.mdot), W_c1


def combustor(st3, TIT, LHV, eta_comb, dP_comb_frac, cp=None):
    """Heat the air to ``TIT``; returns (station 4, Q_h kW, fuel flow kg/s)."""
    if not (0 < eta_comb <= 1):
        raise DomainError(f"combustion efficiency must be in (0, 1], got {eta_comb}")
    if TIT < st3.T:
        raise InfeasibleError("combustor", f"TIT {TIT:.2f} K below compressor exit {st3.T:.2f} K")
    cp_mean = cp if cp is not None else mean_cp_air(st3.T, TIT)
    Q_h = st3.mdot * cp_mean * (TIT - st3.T)
    m_f = Q_h / (LHV * eta_comb)
    st4 = GasStation(T=TIT, P=st3.P * (1.0 - dP_comb_frac), mdot=st3.mdot + m_f)
    return st4, Q_h, m_f


def turbine1(st4, P5_target, eta_T1, k=None):
    """Expand ``st4`` to ``P5_target``; returns (station 5, W_T1 kW)."""
    if P5_target > st4.P:
        raise InfeasibleError("turbine1", f"exit pressure {P5_target:.3f} kPa above inlet {st4.P:.3f} kPa")
    if not (0 < eta_T1 <= 1):
        raise DomainError(f"turbine efficiency must be in (0, 1], got {eta_T1}")
    T4 = st4.T
    ratio = P5_target / st4.P

    def exit_temperature(k_):
        T5s = T4 * ratio ** ((k_ - 1.0) / k_)
        return T4 - eta_T1 * (T4 - T5s)

    if k is not None:
        T5 = exit_temperature(k)
    else:
        T5 = exit_temperature(_k_from_cp(cp_air(T4)))
        for _ in range(FP_MAX_ITER):
            T5_new = exit_temperature(_k_from_cp(mean_cp_air(T4, T5)))
            if abs(T5_new - T5) < FP_TOL:
                T5 = T5_new
                break
            T5 = T5_new
        else:
            raise SolverError("turbine 1 exit temperature did not converge", abs(T5_new - T5))
    W_T1 = st4.mdot * mean_cp_air(T4, T5) * (T4 - T5)
    return GasStation(T=T5, P=P5_target, mdot=st4.mdot), W_T1


def recuperator_gas_side(st5, Q2, dP_frac, T_floor=150.0, cp=None):
    """Gas-side exit of hex2 after giving up ``Q2`` kW to the coolant."""
    if Q2 < 0:
        raise DomainError(f"recuperator duty must be >= 0, got {Q2}")
    P6 = st5.P * (1.0 - dP_frac)
    if Q2 == 0:
        return GasStation(T=st5.T, P=P6, mdot=st5.mdot)
    m = st5.mdot
    if m <= 0:
        raise InfeasibleError("hex2", "positive duty with zero gas flow")
    if cp is not None:
        T6 = st5.T - Q2 / (m * cp)
        if T6 <= T_floor:
            raise InfeasibleError("hex2", f"duty {Q2:.3f} kW exceeds available gas enthalpy")
        return GasStation(T=T6, P=P6, mdot=m)
    available = m * mean_cp_air(st5.T, T_floor) * (st5.T - T_floor)
    if Q2 > available:
        raise InfeasibleError("hex2", f"duty {Q2:.3f} kW exceeds available gas enthalpy {available:.3f} kW")
    T6 = st5.T - Q2 / (m * cp_air(st5.T))
    for _ in range(FP_MAX_ITER):
        T6_new = st5.T - Q2 / (m * mean_cp_air(st5.T, T6))
        if abs(T6_new - T6) < FP_TOL:
            T6 = T6_new
            break
        T6 = T6_new
    else:
        raise SolverError("recuperator gas exit temperature did not converge", abs(T6_new - T6))
    return GasStation(T=T6, P=P6, mdot=m)


def net_power_main(W_T1, W_c1):
    return W_T1 - W_c1

"""Single-point evaluation of the combined cycle and one-axis trend studies."""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import accessory as acc
from . import main_cycle as mc
from .atmosphere import R_AIR, ambient_conditions, flight_velocity, mean_cp_air, n2_saturation_temperature
from .emissions import equivalence_ratio, nox_emissions
from .errors import DomainError, EnvelopeError, InfeasibleError, SolverError


@dataclass(frozen=True)
class CycleInput:
    Ma: float
    H: float  # m
    r_c1: float
    TIT: float  # K
    TF_T2: float
    CR: float
    dT_cool: float  # K of cooling, >= 0

    def __post_init__(self):
        for f in fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise DomainError(f"{f.name} must be finite")


@dataclass(frozen=True)
class EngineConfig:
    """Engine constants the cycle equations need but the design inputs do not fix."""

    # main cycle
    inlet_area: float = 0.1  # m^2
    eta_c1: float = 0.85
    eta_T1: float = 0.90
    eta_comb: float = 0.99
    LHV: float = 120_000.0  # kJ/kg, hydrogen
    dP_comb_frac: float = 0.04
    dP_hex2_gas_frac: float = 0.03
    T_cool_floor: float = 150.0  # K
    # accessory cycle
    m_c: float = 50.0  # kg/s nitrogen
    P_c6: float = 101.325  # kPa, pump-inlet anchor
    eta_pc: float = 0.80
    d_c: float = acc.RHO_N2_LIQUID
    cp_n2_liquid: float = acc.CP_N2_LIQUID
    cp_n2_vapor: float = acc.CP_N2_VAPOR
    dP_ch1_frac: float = 0.02  # of compressor exit pressure
    dP_ch2_frac: float = 0.02
    dP_ch3_frac: float = 0.02
    eta_T2: float = 1.0
    eta_T3: float = 1.0
    eps_hex2: float = 0.8
    # fuel pump and hydrogen heat sink
    P_f1: float = 150.0  # kPa
    P_f2: float = 3000.0  # kPa
    eta_pf: float = 0.80
    d_f: float = acc.RHO_H2_LIQUID
    cp_fuel: float = 12.0  # kJ/kg-K, para-hydrogen between 20 and 70 K, averaged
    dT_fuel: float = 50.0  # K of hydrogen warming allowed in hex3
    latent_fuel: float = 446.0  # kJ/kg
    enforce_fuel_sink: bool = False
    # emissions
    t_res: float = 2e-3  # s
    dt_max: float = 1e-5  # s
    f_no2: float = 0.05
    # hex2 coupling solve
    coupling_damping: float = 0.5
    coupling_tol: float = 1e-6  # K
    coupling_max_iter: int = 200

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class PerformancePoint:
    inputs: CycleInput
    P_out: float  # kW
    PSFC: float  # kg/kWh
    PSFC_raw: float  # kg/s per kW
    eta_th: float
    mdot_NO: float  # kg/s
    mdot_NO2: float
    mdot_NOx: float
    W_net1: float
    W_net2: float
    Q_h: float
    Q1: float
    Q2: float
    Q3: float
    m_a: float
    m_f: float
    phi: float
    main: mc.MainCycleResult = field(repr=False)
    accessory: acc.AccessoryResult = field(repr=False)
    coupling_iterations: int = 0
    flags: tuple = ()

    @property
    def feasible(self):
        return True

    def station_table(self):
        """(name, T K, P kPa) rows for every gas and coolant station."""
        m, a = self.main, self.accessory
        rows = [(f"{i}", s.T, s.P) for i, s in zip("23456", (m.st2, m.st3, m.st4, m.st5, m.st6))]
        rows += [(f"c{i}", s.T, s.P) for i, s in zip("123456", (a.c1, a.c2, a.c3, a.c4, a.c5, a.c6))]
        return rows


@dataclass(frozen=True)
class InfeasiblePoint:
    """A design point that was evaluated but violates a component constraint."""

    inputs: CycleInput
    station: str
    reason: str

    @property
    def feasible(self):
        return False


def evaluate_cycle(inp, cfg=EngineConfig(), T6_guess=None):
    """Evaluate the combined cycle at one design point.

    Raises :class:`InfeasibleError` (with the offending station) when a
    component constraint is violated and :class:`SolverError` when the
    recuperator coupling fails to converge.
    """
    amb = ambient_conditions(inp.H)
    V = flight_velocity(inp.Ma, amb)

    # main cycle up to the power turbine
    st2 = mc.inlet_cooling(amb, inp.dT_cool, cfg.T_cool_floor)
    rho2 = st2.P / (R_AIR * st2.T)
    m_a = mc.inlet_mass_flow(rho2, V, cfg.inlet_area)
    if m_a <= 0:
        raise InfeasibleError("inlet", "no air mass flow (zero flight speed)")
    st2 = replace(st2, mdot=m_a)
    st3, W_c1 = mc.compressor(st2, inp.r_c1, cfg.eta_c1)
    st4, Q_h, m_f = mc.combustor(st3, inp.TIT, cfg.LHV, cfg.eta_comb, cfg.dP_comb_frac)
    P6 = amb.P1
    P5 = P6 / (1.0 - cfg.dP_hex2_gas_frac)
    st5, W_T1 = mc.turbine1(st4, P5, cfg.eta_T1)
    W_net1 = mc.net_power_main(W_T1, W_c1)

    # accessory cycle up to hex2
    dP1, dP2, dP3 = (f * st3.P for f in (cfg.dP_ch1_frac, cfg.dP_ch2_frac, cfg.dP_ch3_frac))
    c6_in = acc.CoolantStation(T=n2_saturation_temperature(cfg.P_c6), P=cfg.P_c6, phase="liquid")
    c1, W_PC = acc.cooling_pump(c6_in, inp.CR, cfg.m_c, cfg.eta_pc, cfg.d_c, cfg.cp_n2_liquid)
    Q1 = m_a * mean_cp_air(amb.T1, st2.T) * inp.dT_cool
    c2 = acc.hex1_cold_side(c1, Q1, cfg.m_c, dP1, st2.T, cfg.cp_n2_vapor)
    c3, W_T2 = acc.turbine2(c2, inp.TF_T2, cfg.m_c, cfg.eta_T2, cfg.cp_n2_vapor)

    # hex2: effectiveness model, damped fixed point on (T6, T_c4)
    C_cold = cfg.m_c * cfg.cp_n2_vapor
    T5 = st5.T
    T6 = T6_guess if T6_guess is not None else 0.5 * (T5 + c3.T)
    T_c4 = c3.T
    residual = math.inf
    for it in range(1, cfg.coupling_max_iter + 1):
        C_hot = st5.mdot * mean_cp_air(T5, T6)
        Q2 = cfg.eps_hex2 * min(C_hot, C_cold) * (T5 - c3.T)
        st6 = mc.recuperator_gas_side(st5, Q2, cfg.dP_hex2_gas_frac, cfg.T_cool_floor)
        c4 = acc.hex2_cold_side(c3, Q2, cfg.m_c, dP2, T5, cfg.cp_n2_vapor)
        residual = max(abs(st6.T - T6), abs(c4.T - T_c4))
        if residual < cfg.coupling_tol:
            break
        T6 += cfg.coupling_damping * (st6.T - T6)
        T_c4 += cfg.coupling_damping * (c4.T - T_c4)
    else:
        raise SolverError("hex2 coupling did not converge", residual)

    # accessory cycle closure
    P_c5 = cfg.P_c6 + dP3
    c5, W_T3 = acc.turbine3(c4, P_c5, cfg.m_c, cfg.eta_T3, cfg.cp_n2_vapor)
    sink_per_kg = cfg.cp_fuel * cfg.dT_fuel + cfg.latent_fuel
    c6, Q3, utilization = acc.hex3_condenser(
        c5, cfg.m_c, dP3, m_f, sink_per_kg, cfg.cp_n2_vapor, cfg.enforce_fuel_sink
    )
    W_pf = acc.fuel_pump(m_f, cfg.P_f1, cfg.P_f2, cfg.eta_pf, cfg.d_f)
    W_net2 = acc.net_power_accessory(W_T2, W_T3, W_PC, W_pf)

    P_out = W_net1 + W_net2
    if P_out <= 0:
        raise InfeasibleError("engine", f"non-positive shaft power {P_out:.3f} kW")
    eta_th = P_out / Q_h
    if not (0.0 < eta_th < 1.0):
        raise InfeasibleError("engine", f"thermal efficiency {eta_th:.4f} outside (0, 1)")

    phi = equivalence_ratio(m_f, m_a)
    em, _ = nox_emissions(st4.T, st4.P, phi, st4.mdot, cfg.t_res, cfg.dt_max, cfg.f_no2)

    flags = []
    if W_net2 < 0:
        flags.append("parasitic_accessory")
    if utilization > 1.0:
        flags.append("fuel_sink_oversubscribed")

    main = mc.MainCycleResult(st2, st3, st4, st5, st6, W_c1, W_T1, W_net1, Q_h, m_f, Q2)
    accessory = acc.AccessoryResult(
        c1, c2, c3, c4, c5, c6, W_PC, W_T2, W_T3, W_pf, Q1, Q2, Q3, W_net2, cfg.m_c, utilization
    )
    return PerformancePoint(
        inputs=inp,
        P_out=P_out,
        PSFC=3600.0 * m_f / P_out,
        PSFC_raw=m_f / P_out,
        eta_th=eta_th,
        mdot_NO=em.mdot_NO,
        mdot_NO2=em.mdot_NO2,
        mdot_NOx=em.mdot_NOx,
        W_net1=W_net1,
        W_net2=W_net2,
        Q_h=Q_h,
        Q1=Q1,
        Q2=Q2,
        Q3=Q3,
        m_a=m_a,
        m_f=m_f,
        phi=phi,
        main=main,
        accessory=accessory,
        coupling_iterations=it,
        flags=tuple(flags),
    )


def try_evaluate(inp, cfg=EngineConfig()):
    """Like :func:`evaluate_cycle` but returns an :class:`InfeasiblePoint` instead of raising
    for component infeasibility. Solver failures still raise."""
    try:
        return evaluate_cycle(inp, cfg)
    except InfeasibleError as exc:
        return InfeasiblePoint(inp, exc.station, str(exc))


def _try_evaluate_args(args):
    return try_evaluate(*args)


def evaluate_many(inputs, cfg=EngineConfig(), workers=1):
    """Evaluate points in input order; ``workers > 1`` fans out to processes."""
    inputs = list(inputs)
    if workers <= 1 or len(inputs) < 2:
        return [try_evaluate(i, cfg) for i in inputs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_try_evaluate_args, [(i, cfg) for i in inputs], chunksize=32))


AXES = {
    "mach": "Ma",
    "alt": "H",
    "rc1": "r_c1",
    "tit": "TIT",
    "tf_t2": "TF_T2",
    "cr": "CR",
    "dt_cool": "dT_cool",
}


def trend_study(axis, lo, hi, n_points, base, cfg=EngineConfig(), workers=1):
    """Sweep one input from ``lo`` to ``hi`` holding the rest of ``base`` fixed.

    ``axis`` is a :class:`CycleInput` field name or one of the short names in
    :data:`AXES`. Returns ``(values, points)``; infeasible points stay in
    place as :class:`InfeasiblePoint`.
    """
    name = AXES.get(axis, axis)
    if name not in {f.name for f in fields(CycleInput)}:
        raise DomainError(f"unknown trend axis {axis!r}")
    if n_points < 2:
        raise DomainError("a trend needs at least two points")
    values = np.linspace(lo, hi, n_points)
    inputs = [replace(base, **{name: float(v)}) for v in values]
    return values, evaluate_many(inputs, cfg, workers)


# Hard validity windows of the component models; envelopes must sit inside.
VALIDITY = {
    "TF_T2": (1e-6, 1.0),
    "CR": (1.0, 50.0),
    "TIT": (800.0, 2500.0),
    "r_c1": (1.0, 60.0),
    "dT_cool": (0.0, 150.0),
    "Ma": (1e-6, 3.0),
    "H": (0.0, 20_000.0),
}


@dataclass(frozen=True)
class Envelope:
    """Closed per-field ranges for sweeps. Field order is the feature order."""

    TF_T2: tuple = (0.70, 0.95)
    CR: tuple = (6.0, 12.0)
    TIT: tuple = (1400.0, 1800.0)
    r_c1: tuple = (6.0, 16.0)
    dT_cool: tuple = (0.0, 100.0)
    Ma: tuple = (0.3, 0.8)
    H: tuple = (3000.0, 4000.0)

    def __post_init__(self):
        for name, (lo, hi) in self.items():
            vlo, vhi = VALIDITY[name]
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise EnvelopeError(f"{name}: bad range [{lo}, {hi}]")
            if lo < vlo or hi > vhi:
                raise EnvelopeError(f"{name}: range [{lo}, {hi}] leaves validity window [{vlo}, {vhi}]")

    @classmethod
    def names(cls):
        return tuple(f.name for f in fields(cls))

    def items(self):
        return [(n, tuple(float(v) for v in getattr(self, n))) for n in self.names()]

    def bounds(self):
        lo, hi = zip(*(r for _, r in self.items()))
        return np.array(lo), np.array(hi)

    def contains(self, inp):
        return all(lo <= getattr(inp, n) <= hi for n, (lo, hi) in self.items())

    def check(self, inp):
        for n, (lo, hi) in self.items():
            v = getattr(inp, n)
            if not (lo <= v <= hi):
                raise EnvelopeError(f"{n}={v} outside envelope [{lo}, {hi}]")

    def to_dict(self):
        return {n: list(r) for n, r in self.items()}


REFERENCE_POINT = CycleInput(
    Ma=0.3, H=4000.0, r_c1=10.0, TIT=1700.0, TF_T2=0.8, CR=8.0, dT_cool=100.0
)

"""Pin the reference design point as a regression fixture.

Before writing, the engine result is re-derived with an independent energy
balance written out longhand here (own cp polynomial, own ISA formula, own
component relations). The fixture is written only if both agree.

Run from the repository root:  python3 tools/pin_reference.py
"""

import json
import math
from pathlib import Path

from regen_turboshaft.engine import REFERENCE_POINT, EngineConfig, evaluate_cycle

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "reference_point.json"

A = (0.99963438, -0.055205312e-3, 0.346320281e-6, -0.140118997e-9)


def cp(T):
    return A[0] + A[1] * T + A[2] * T**2 + A[3] * T**3


def hand_check(p, cfg):
    inp = REFERENCE_POINT
    # ambient
    T1 = 288.15 - 0.0065 * inp.H
    P1 = 101.325 * (T1 / 288.15) ** (9.80665 / (0.0065 * 287.05287))
    k1 = cp(T1) / (cp(T1) - 0.287)
    V = inp.Ma * math.sqrt(k1 * 287.0 * T1)
    T2 = T1 - inp.dT_cool
    m_a = P1 / (0.287 * T2) * V * cfg.inlet_area
    assert math.isclose(m_a, p.m_a, rel_tol=1e-12), (m_a, p.m_a)

    # compressor, using the engine's converged T3 in the closed-form relation
    T3 = p.main.st3.T
    cpm = cp(0.5 * (T2 + T3))
    k = cpm / (cpm - 0.287)
    T3_rel = T2 * (1 + (inp.r_c1 ** ((k - 1) / k) - 1) / cfg.eta_c1)
    assert abs(T3_rel - T3) < 1e-5, (T3_rel, T3)
    W_c1 = m_a * cpm * (T3 - T2)

    # combustor
    Q_h = m_a * cp(0.5 * (T3 + inp.TIT)) * (inp.TIT - T3)
    m_f = Q_h / (cfg.LHV * cfg.eta_comb)
    m_T = m_a + m_f

    # turbine 1
    T5 = p.main.st5.T
    cpm = cp(0.5 * (inp.TIT + T5))
    k = cpm / (cpm - 0.287)
    P4 = inp.r_c1 * P1 * (1 - cfg.dP_comb_frac)
    P5 = P1 / (1 - cfg.dP_hex2_gas_frac)
    T5_rel = inp.TIT - cfg.eta_T1 * (inp.TIT - inp.TIT * (P5 / P4) ** ((k - 1) / k))
    assert abs(T5_rel - T5) < 1e-5, (T5_rel, T5)
    W_T1 = m_T * cpm * (inp.TIT - T5)

    # recuperator: both sides must carry the same duty
    T6 = p.main.st6.T
    q_gas = m_T * cp(0.5 * (T5 + T6)) * (T5 - T6)
    a = p.accessory
    q_cool = cfg.m_c * cfg.cp_n2_vapor * (a.c4.T - a.c3.T)
    assert math.isclose(q_gas, p.Q2, rel_tol=1e-6), (q_gas, p.Q2)
    assert math.isclose(q_cool, p.Q2, rel_tol=1e-9), (q_cool, p.Q2)

    # vapor leg c2 -> c5: enthalpy drop plus recuperator heat equals turbine work
    leg = cfg.m_c * cfg.cp_n2_vapor * (a.c2.T - a.c5.T) + p.Q2
    assert math.isclose(leg, a.W_T2 + a.W_T3, rel_tol=1e-9), (leg, a.W_T2 + a.W_T3)

    P_out = (W_T1 - W_c1) + p.W_net2
    for name, mine, theirs in (("Q_h", Q_h, p.Q_h), ("m_f", m_f, p.m_f), ("P_out", P_out, p.P_out)):
        assert math.isclose(mine, theirs, rel_tol=1e-12), (name, mine, theirs)


def main():
    cfg = EngineConfig()
    p = evaluate_cycle(REFERENCE_POINT, cfg)
    hand_check(p, cfg)
    doc = {
        "provenance": "tools/pin_reference.py; engine output cross-checked against a longhand energy balance",
        "inputs": {k: getattr(REFERENCE_POINT, k) for k in ("Ma", "H", "r_c1", "TIT", "TF_T2", "CR", "dT_cool")},
        "outputs": {
            k: getattr(p, k)
            for k in ("P_out", "PSFC", "eta_th", "mdot_NO", "mdot_NO2", "mdot_NOx",
                      "W_net1", "W_net2", "Q_h", "Q1", "Q2", "Q3", "m_a", "m_f", "phi")
        },
        "stations": {name: [T, P] for name, T, P in p.station_table()},
    }
    OUT.write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()

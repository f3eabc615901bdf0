"""Regenerate the shipped property data files.

Run once, offline, from the repository root::

    python3 tools/generate_property_data.py

Requires cantera (tooling only, not a runtime dependency). Writes
``src/regen_turboshaft/data/equilibrium_constants.dat`` and prints the
nitrogen Antoine coefficients that live in ``atmosphere.py``.
"""

from pathlib import Path

import cantera as ct
import numpy as np
from scipy.optimize import curve_fit

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "src" / "regen_turboshaft" / "data" / "equilibrium_constants.dat"

# reaction id -> (reactants, products), stoichiometric coefficients
REACTIONS = {
    "O2_2O": ({"O2": 1.0}, {"O": 2.0}),
    "H2O_H2_halfO2": ({"H2O": 1.0}, {"H2": 1.0, "O2": 0.5}),
    "H2O_halfO2_2OH": ({"H2O": 1.0, "O2": 0.5}, {"OH": 2.0}),
    "H2_2H": ({"H2": 1.0}, {"H": 2.0}),
    "N2_O2_2NO": ({"N2": 1.0, "O2": 1.0}, {"NO": 2.0}),
}

T_LO, T_HI = 700.0, 2800.0

# Nitrogen saturation pressure (MPa) vs temperature (K), NIST Chemistry
# WebBook fluid tables (Span et al. 2000 reference equation of state).
N2_SAT = np.array([
    (65.0, 0.017418),
    (70.0, 0.038545),
    (75.0, 0.076043),
    (77.355, 0.101325),
    (80.0, 0.136990),
    (85.0, 0.229030),
    (90.0, 0.360660),
    (95.0, 0.540820),
    (100.0, 0.778810),
    (105.0, 1.084100),
    (110.0, 1.467300),
    (115.0, 1.940300),
    (120.0, 2.513000),
])


def ln_kp(gas, reaction, T):
    """ln Kp at the 1 atm standard state from NASA-7 standard Gibbs energies."""
    reac, prod = reaction
    gas.TP = T, ct.one_atm
    g_rt = dict(zip(gas.species_names, gas.standard_gibbs_RT))
    dg = sum(n * g_rt[s] for s, n in prod.items()) - sum(n * g_rt[s] for s, n in reac.items())
    return -dg


def lnk_form(T, a0, a1, a2, a3, a4):
    return a0 + a1 / T + a2 * np.log(T) + a3 * T + a4 * T**2


def main():
    gas = ct.Solution("gri30.yaml")
    # GRI-Mech thermo is referenced to 1 atm; the fit keeps that standard state
    assert abs(gas.reference_pressure - ct.one_atm) < 1e-6
    T = np.linspace(T_LO, T_HI, 421)
    lines = [
        "# ln Kp(T) = a0 + a1/T + a2*ln(T) + a3*T + a4*T^2, Kp on a 1 atm (101.325 kPa) standard state",
        "# fitted to NASA-7 standard Gibbs energies (GRI-Mech 3.0 thermo via cantera "
        f"{ct.__version__}) on {T_LO:.0f}-{T_HI:.0f} K",
        "# generator: tools/generate_property_data.py",
        "# version 1",
        "# id t_min t_max a0 a1 a2 a3 a4 max_abs_fit_error",
    ]
    for rid, rxn in REACTIONS.items():
        y = np.array([ln_kp(gas, rxn, t) for t in T])
        coef, _ = curve_fit(lnk_form, T, y, p0=[0, -1e4, 0, 0, 0])
        err = np.max(np.abs(lnk_form(T, *coef) - y))
        lines.append(
            f"{rid} {T_LO:.1f} {T_HI:.1f} " + " ".join(f"{c:.12e}" for c in coef) + f" {err:.3e}"
        )
        print(rid, err)
    OUT.write_text("\n".join(lines) + "\n")

    # Antoine fit: log10(P/kPa) = A - B/(T + C)
    t, p_kpa = N2_SAT[:, 0], N2_SAT[:, 1] * 1e3

    def antoine(T, A, B, C):
        return A - B / (T + C)

    (A, B, C), _ = curve_fit(antoine, t, np.log10(p_kpa), p0=[6.7, 265.0, -6.8])
    resid = antoine(t, A, B, C) - np.log10(p_kpa)
    print(f"N2 Antoine: A={A:.10f} B={B:.10f} C={C:.10f} max|dlog10P|={np.max(np.abs(resid)):.2e}")


if __name__ == "__main__":
    main()

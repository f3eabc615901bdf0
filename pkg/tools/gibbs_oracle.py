"""Brute-force Gibbs-minimization oracle for lean H2-air products.

Minimizes the total Gibbs energy of {H2O, O2, N2, O, OH, H, H2} under
element conservation (majors follow from the H and O atom budgets) with a
damped Newton descent on the total Gibbs energy, using
NASA-7 standard Gibbs energies (GRI-Mech 3.0 via cantera). Results are
written to tests/fixtures/gibbs_oracle.json and used to check the
partial-equilibrium radical pool computed at runtime from the fitted
equilibrium constants.

    python3 tools/gibbs_oracle.py
"""

import json
from pathlib import Path

import cantera as ct
import numpy as np

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "tests" / "fixtures" / "gibbs_oracle.json"

SPECIES = ["H2O", "O2", "N2", "O", "OH", "H", "H2"]
FREE = ["O", "OH", "H", "H2"]

TEMPERATURES = [1400.0, 1700.0, 2000.0, 2300.0, 2600.0]
PRESSURE_KPA = 1000.0
PHI = 0.5

# d(n_H2O)/d(n_free) and d(n_O2)/d(n_free) implied by H and O conservation
D_H2O = np.array([0.0, -0.5, -0.5, -1.0])
D_O2 = np.array([-0.5, -0.25, 0.25, 0.5])


def g_rt(gas, T):
    gas.TP = T, ct.one_atm
    lookup = dict(zip(gas.species_names, gas.standard_gibbs_RT))
    return np.array([lookup[s] for s in SPECIES])


def moles(z):
    free = np.exp(z)
    n_o, n_oh, n_h, n_h2 = free
    h2o = 0.5 * (4 * PHI - n_oh - n_h - 2 * n_h2)
    o2 = 0.5 * (2.0 - h2o - n_o - n_oh)
    return np.array([h2o, o2, 3.76, n_o, n_oh, n_h, n_h2])


# Jacobian of all species amounts with respect to the free (radical) amounts
DN = np.vstack([D_H2O, D_O2, np.zeros(4), np.eye(4)])


def minimize_gibbs(g0, p_ratio, tol=1e-12, max_iter=500):
    """Damped Newton descent of G over the radical amounts (G is convex there)."""

    def gibbs(free):
        n = moles(np.log(free))
        if np.any(n <= 0):
            return np.inf
        return float(n @ (g0 + np.log(p_ratio) + np.log(n / n.sum())))

    free = np.array([1e-6, 1e-5, 1e-8, 1e-6])
    for it in range(max_iter):
        n = moles(np.log(free))
        mu = g0 + np.log(p_ratio) + np.log(n / n.sum())
        grad = DN.T @ mu
        col = DN.sum(axis=0)
        hess = (DN.T / n) @ DN - np.outer(col, col) / n.sum()
        step = -np.linalg.solve(hess, grad)
        # never let an amount fall below a tenth of its current value
        shrink = np.where(free + step < 0.1 * free, 0.9 * free / np.maximum(-step, 1e-300), 1.0)
        t = min(1.0, float(shrink.min()))
        g_old = gibbs(free)
        while gibbs(free + t * step) > g_old and t > 1e-12:
            t *= 0.5
        free = free + t * step
        if np.max(np.abs(t * step) / free) < tol:
            break
    return it, moles(np.log(free))


def main():
    gas = ct.Solution("gri30.yaml")
    p_ratio = PRESSURE_KPA / 101.325
    cases = []
    for T in TEMPERATURES:
        res, n = minimize_gibbs(g_rt(gas, T), p_ratio)
        x = n / n.sum()
        # cross-check with cantera's own solver on the same species set
        sub = ct.Solution(thermo="ideal-gas", species=[gas.species(s) for s in SPECIES])
        sub.TPX = T, PRESSURE_KPA * 1e3, {"H2O": 2 * PHI, "O2": 1 - PHI, "N2": 3.76}
        sub.equilibrate("TP")
        x_ct = np.array([sub.X[sub.species_index(s)] for s in SPECIES])
        rel = np.max(np.abs(x - x_ct) / x_ct)
        print(f"T={T:.0f} newton iterations={res} max rel diff vs cantera {rel:.2e}")
        cases.append({"T_K": T, "mole_fractions": dict(zip(SPECIES, map(float, x)))})
    payload = {
        "provenance": "tools/gibbs_oracle.py: damped-Newton Gibbs minimization over radical amounts, NASA-7 thermo "
                      f"(GRI-Mech 3.0, cantera {ct.__version__}), species {SPECIES}",
        "P_kPa": PRESSURE_KPA,
        "phi": PHI,
        "cases": cases,
    }
    OUT.write_text(json.dumps(payload, indent=2) + "\n")


if __name__ == "__main__":
    main()

"""Hydrogen-air combustion products and thermal (Zeldovich) NO formation.

Major products of lean H2-air combustion come from the atom balance; the
O, OH, H and H2 radicals follow from partial equilibrium with the majors,
using equilibrium-constant fits shipped in ``data/equilibrium_constants.dat``.
NO is then integrated over a residence time with the three-reaction
Zeldovich scheme, N atoms held in quasi-steady state and the radical pool
frozen.

Concentrations are kmol/m^3, pressures kPa, temperatures K.
"""

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources

from .atmosphere import R_UNIVERSAL
from .errors import DomainError, FormatError, IntegrationError

P_STANDARD = 101.325  # kPa, reference state of the equilibrium-constant fits
FAR_STOICH = 0.02936  # kg H2 per kg air, H2 + 0.5 (O2 + 3.76 N2)
N2_PER_O2 = 3.76

MOLAR_MASS = {
    "N2": 28.0134,
    "O2": 31.9988,
    "O": 15.9994,
    "OH": 17.00734,
    "H": 1.00794,
    "H2": 2.01588,
    "H2O": 18.01528,
    "NO": 30.0061,
    "NO2": 46.0055,
    "N": 14.0067,
}
SPECIES = tuple(MOLAR_MASS)

T_FLAME_MIN = 800.0
T_FLAME_MAX = 2600.0
PHI_MAX = 1.0  # lean branch only; see product_composition


@dataclass(frozen=True)
class ZeldovichRates:
    """Forward/backward rate constants of the three Zeldovich reactions.

    1: O + N2 <-> NO + N, 2: N + O2 <-> NO + O, 3: N + OH <-> NO + H.
    """

    k1f: float
    k1b: float
    k2f: float
    k2b: float
    k3f: float
    k3b: float


@dataclass(frozen=True)
class CombustionState:
    T_flame: float
    P: float
    phi: float
    conc: dict = field(hash=False)
    rho_mix: float
    M_mix: float

    @property
    def c_total(self):
        return sum(self.conc.values())

    def mass_fractions(self):
        return {s: c * MOLAR_MASS[s] / self.rho_mix for s, c in self.conc.items()}

    def mole_fractions(self):
        total = self.c_total
        return {s: c / total for s, c in self.conc.items()}

    def with_nox(self, no, no2):
        """Copy of this state carrying ``no`` and ``no2`` (kmol/m^3).

        The nitrogen and oxygen for the oxides are drawn from N2 and O2
        (N2 + O2 -> 2 NO, NO + 1/2 O2 -> NO2), so atoms and mass are conserved.
        """
        conc = dict(self.conc)
        d_no = no + no2 - conc["NO"] - conc["NO2"]
        d_no2 = no2 - conc["NO2"]
        conc["N2"] -= 0.5 * d_no
        conc["O2"] -= 0.5 * d_no + 0.5 * d_no2
        conc["NO"] = no
        conc["NO2"] = no2
        if conc["N2"] < 0 or conc["O2"] < 0:
            raise DomainError("NOx level exceeds the available N2/O2 pool")
        rho = sum(c * MOLAR_MASS[s] for s, c in conc.items())
        c_tot = sum(conc.values())
        return replace(self, conc=conc, rho_mix=rho, M_mix=rho / c_tot, P=c_tot * R_UNIVERSAL * self.T_flame)


@dataclass(frozen=True)
class EmissionResult:
    y_NO: float
    y_NO2: float
    mdot_NO: float
    mdot_NO2: float
    mdot_NOx: float


@lru_cache(maxsize=None)
def load_equilibrium_constants():
    """Read the ln Kp fit table; returns {id: (t_min, t_max, coeffs)}."""
    text = resources.files(__package__).joinpath("data/equilibrium_constants.dat").read_text()
    table = {}
    version = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line[1:].strip().startswith("version"):
                version = line[1:].split()[1]
            continue
        parts = line.split()
        if len(parts) != 9:
            raise FormatError(f"equilibrium_constants.dat line {lineno}: expected 9 fields, got {len(parts)}")
        t_min, t_max, *coeffs = map(float, parts[1:8])
        table[parts[0]] = (t_min, t_max, tuple(coeffs))
    if version != "1":
        raise FormatError(f"equilibrium_constants.dat: unsupported version {version!r}")
    return table


def equilibrium_constant(reaction, T):
    """Kp of a tabulated reaction on the 1 atm standard state."""
    t_min, t_max, (a0, a1, a2, a3, a4) = load_equilibrium_constants()[reaction]
    if not (t_min <= T <= t_max):
        raise DomainError(f"T={T} K outside fit range of {reaction} [{t_min}, {t_max}] K")
    return math.exp(a0 + a1 / T + a2 * math.log(T) + a3 * T + a4 * T * T)


def equivalence_ratio(m_f, m_a):
    if m_a <= 0:
        raise DomainError("air mass flow must be positive to form an equivalence ratio")
    return (m_f / m_a) / FAR_STOICH


def _major_moles(phi):
    # basis: 1 kmol O2 of air; fuel 2*phi kmol H2
    return {"H2O": 2.0 * phi, "O2": 1.0 - phi, "N2": N2_PER_O2}


def product_composition(T_flame, P, phi):
    """Lean H2-air products at ``T_flame`` and ``P`` with radicals in partial equilibrium.

    Radical amounts are found by fixed point: majors give radicals via the
    equilibrium constants, radicals are then charged against the H and O
    atom budgets of H2O and O2. [N], [NO] and [NO2] start at zero.
    """
    if not (T_FLAME_MIN <= T_flame <= T_FLAME_MAX):
        raise DomainError(f"flame temperature {T_flame} K outside [{T_FLAME_MIN}, {T_FLAME_MAX}] K")
    if not (0.0 <= phi < PHI_MAX):
        raise DomainError(f"equivalence ratio {phi} outside lean range [0, {PHI_MAX})")
    if P <= 0:
        raise DomainError("pressure must be positive")

    p = P / P_STANDARD
    K_O = equilibrium_constant("O2_2O", T_flame)
    K_H2 = equilibrium_constant("H2O_H2_halfO2", T_flame)
    K_OH = equilibrium_constant("H2O_halfO2_2OH", T_flame)
    K_H = equilibrium_constant("H2_2H", T_flame)

    h_atoms = 4.0 * phi
    o_atoms = 2.0
    n = _major_moles(phi)
    n.update(O=0.0, OH=0.0, H=0.0, H2=0.0)
    for _ in range(200):
        total = sum(n.values())
        x = {s: v / total for s, v in n.items()}
        x_O = math.sqrt(K_O * x["O2"] / p)
        # With O2 and the total frozen, x_H2 = b*x_H2O and x_OH, x_H scale with
        # sqrt(x_H2O); the H balance is then a quadratic in u = sqrt(n_H2O).
        b = K_H2 / math.sqrt(x["O2"] * p)
        a_oh = math.sqrt(K_OH * math.sqrt(x["O2"] / p))
        a_h = math.sqrt(K_H * b / p)
        qa, qb = 2.0 + 2.0 * b, (a_oh + a_h) * math.sqrt(total)
        u = 2.0 * h_atoms / (qb + math.sqrt(qb * qb + 4.0 * qa * h_atoms)) if h_atoms > 0 else 0.0
        w = u * u
        new = {"O": x_O * total, "OH": a_oh * u * math.sqrt(total), "H": a_h * u * math.sqrt(total),
               "H2": b * w, "H2O": w}
        new["O2"] = 0.5 * (o_atoms - new["H2O"] - new["O"] - new["OH"])
        new["N2"] = N2_PER_O2
        change = max(abs(new[s] - n[s]) for s in new)
        n = new
        if change < 1e-15:
            break
    total = sum(n.values())
    c_tot = P / (R_UNIVERSAL * T_flame)
    conc = {s: 0.0 for s in SPECIES}
    for s, v in n.items():
        conc[s] = v / total * c_tot
    rho = sum(c * MOLAR_MASS[s] for s, c in conc.items())
    return CombustionState(T_flame=T_flame, P=P, phi=phi, conc=conc, rho_mix=rho, M_mix=rho / c_tot)


def zeldovich_rates(T):
    """Arrhenius rate constants of the Zeldovich reactions, m^3/kmol-s."""
    if T <= 0:
        raise DomainError("temperature must be positive")
    return ZeldovichRates(
        k1f=1.8e14 * math.exp(-38370.0 / T),
        k1b=1.8e14 * math.exp(-425.0 / T),
        k2f=1.8e14 * math.exp(-4680.0 / T),
        k2b=1.8e14 * math.exp(-20820.0 / T),
        k3f=7.1e13 * math.exp(-450.0 / T),
        k3b=1.7e14 * math.exp(-24560.0 / T),
    )


def equilibrium_no(state):
    """Thermal-equilibrium NO concentration from N2 + O2 <-> 2 NO over the frozen pool."""
    K = equilibrium_constant("N2_O2_2NO", state.T_flame)
    return math.sqrt(K * state.conc["N2"] * state.conc["O2"])


def no_rate_function(state, rates=None):
    """Return f([NO]) = d[NO]/dt with [N] eliminated by the quasi-steady assumption."""
    r = rates or zeldovich_rates(state.T_flame)
    c = state.conc
    O, N2, O2, OH, H = c["O"], c["N2"], c["O2"], c["OH"], c["H"]
    prod_n = r.k1f * O * N2
    loss_n = r.k2f * O2 + r.k3f * OH

    def f(no):
        n_ss = (prod_n + no * (r.k2b * O + r.k3b * H)) / (r.k1b * no + loss_n)
        return (
            prod_n
            - r.k1b * no * n_ss
            + r.k2f * n_ss * O2
            - r.k2b * no * O
            + r.k3f * n_ss * OH
            - r.k3b * no * H
        )

    return f


def integrate_no(state, t_res, dt_max=1e-5):
    """[NO] after ``t_res`` seconds of Zeldovich kinetics from [NO] = 0.

    Classical RK4 with a fixed step no larger than ``dt_max`` and no larger
    than half the local relaxation time. The result is capped at the
    thermal-equilibrium NO level.
    """
    if t_res < 0:
        raise DomainError("residence time must be non-negative")
    if t_res == 0:
        return 0.0
    if dt_max <= 0:
        raise IntegrationError("step-size limit must be positive")
    f = no_rate_function(state)
    no_eq = equilibrium_no(state)
    f0 = f(0.0)
    if f0 == 0.0 or no_eq == 0.0:
        return 0.0

    # steepest secant slope of f on [0, no_eq] bounds the relaxation rate
    grid = [no_eq * i / 8.0 for i in range(9)]
    values = [f(g) for g in grid]
    lam = max(abs(values[i + 1] - values[i]) / (grid[i + 1] - grid[i]) for i in range(8))
    dt = dt_max if lam == 0 else min(dt_max, 0.5 / lam)
    n_steps = max(1, math.ceil(t_res / dt))
    if n_steps > 10_000_000:
        raise IntegrationError(f"step size underflow: {n_steps} steps required")
    h = t_res / n_steps

    no = 0.0
    for _ in range(n_steps):
        a = f(no)
        b = f(no + 0.5 * h * a)
        cc = f(no + 0.5 * h * b)
        d = f(no + h * cc)
        no += h / 6.0 * (a + 2.0 * b + 2.0 * cc + d)
        if no >= no_eq:
            no = no_eq
            break
    if not math.isfinite(no):
        raise IntegrationError("NO concentration became non-finite")
    return no


def integrate_no_euler(state, t_res, dt):
    """Explicit Euler reference integration at a fixed step (slow; for checks)."""
    f = no_rate_function(state)
    no_eq = equilibrium_no(state)
    n_steps = max(1, round(t_res / dt))
    h = t_res / n_steps
    no = 0.0
    for _ in range(n_steps):
        no += h * f(no)
    return min(no, no_eq)


def partition_no2(no_conc, f_no2=0.05):
    """Split a total NO concentration into (NO, NO2) with NO2 share ``f_no2``."""
    if not (0.0 <= f_no2 < 1.0):
        raise DomainError(f"NO2 fraction must be in [0, 1), got {f_no2}")
    return (1.0 - f_no2) * no_conc, f_no2 * no_conc


def species_mass_flows(state, mdot_tot):
    if mdot_tot < 0:
        raise DomainError("total mass flow must be non-negative")
    y = state.mass_fractions()
    m_no = y["NO"] * mdot_tot
    m_no2 = y["NO2"] * mdot_tot
    return EmissionResult(y_NO=y["NO"], y_NO2=y["NO2"], mdot_NO=m_no, mdot_NO2=m_no2, mdot_NOx=m_no + m_no2)


def nox_emissions(T_flame, P, phi, mdot_tot, t_res=2e-3, dt_max=1e-5, f_no2=0.05):
    """Full chain: products -> Zeldovich NO -> NO/NO2 split -> exhaust mass flows."""
    state = product_composition(T_flame, P, phi)
    no_total = integrate_no(state, t_res, dt_max)
    no, no2 = partition_no2(no_total, f_no2)
    return species_mass_flows(state.with_nox(no, no2), mdot_tot), state

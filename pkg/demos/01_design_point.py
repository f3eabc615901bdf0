"""Walk through one design point station by station.

    python3 demos/01_design_point.py
"""

from regen_turboshaft import REFERENCE_POINT, evaluate_cycle

p = evaluate_cycle(REFERENCE_POINT)
inp = p.inputs

print("Design point")
print(f"  flight: Ma {inp.Ma}, altitude {inp.H:.0f} m")
print(f"  main cycle: pressure ratio {inp.r_c1}, turbine inlet {inp.TIT:.0f} K, inlet cooling {inp.dT_cool:.0f} K")
print(f"  nitrogen loop: pump ratio {inp.CR}, turbine-2 temperature fraction {inp.TF_T2}")
print()

print("Stations (the c-stations belong to the nitrogen loop)")
for name, T, P in p.station_table():
    print(f"  {name:<4} {T:9.2f} K {P:10.2f} kPa")
print()

m, a = p.main, p.accessory
print("Where the power comes from")
print(f"  turbine 1      {m.W_T1:10.1f} kW")
print(f"  compressor     {-m.W_c1:10.1f} kW")
print(f"  turbine 2      {a.W_T2:10.1f} kW")
print(f"  turbine 3      {a.W_T3:10.1f} kW")
print(f"  N2 pump        {-a.W_PC:10.1f} kW")
print(f"  fuel pump      {-a.W_pf:10.1f} kW")
print(f"  shaft output   {p.P_out:10.1f} kW")
print()
print(f"Heat released {p.Q_h:.0f} kW, so thermal efficiency is {p.eta_th:.4f}")
print(f"Fuel {p.m_f:.4f} kg/s of hydrogen, PSFC {p.PSFC:.4f} kg/kWh, equivalence ratio {p.phi:.3f}")
print(f"Recuperator returns {p.Q2:.0f} kW of exhaust heat to the nitrogen loop")
print(f"NOx {p.mdot_NOx * 1e3:.4f} g/s (NO {p.mdot_NO * 1e3:.4f}, NO2 {p.mdot_NO2 * 1e3:.4f})")
print(f"Diagnostics: {', '.join(p.flags) or 'none'}")

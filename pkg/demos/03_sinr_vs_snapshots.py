"""A small SINR-versus-K experiment for the three mismatch scenarios.

Uses 20 runs instead of 100 to stay quick; the CLI (`sdrbeam run-curve`)
runs the full protocol.
"""
from sdrbeam import CoherentScattering, Exact, PhaseDistortion, Scenario, Sweep, run_monte_carlo

methods = ["proposed", "mv_smi", "worst_case", "eigenspace", "subspace"]
cases = {
    "exact": Exact(),
    "phase 0.04": PhaseDistortion(0.04),
    "scattering": CoherentScattering(4, angle_std=1.0, angle_distribution="normal"),
}

for label, mm in cases.items():
    curve = run_monte_carlo(Sweep(Scenario(mismatch=mm), "snapshots", [10, 30, 100]), methods, runs=20)
    print(f"\n{label}")
    print("   K " + "".join(f"{m:>12s}" for m in ["optimal"] + methods))
    for p in curve.points:
        print(f"{p.x:4d} " + "".join(f"{p.mean_sinr_db[m]:12.2f}" for m in ["optimal"] + methods))

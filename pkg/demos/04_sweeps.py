"""
Sweeping N, dt and h
====================

Same harness as ``qutrit-anneal sweep``; results print as CSV-ish rows.
"""
import numpy as np

from qutrit_anneal.engine import run_sweep
from qutrit_anneal.hamiltonians import IDEAL, AnnealConfig

base = AnnealConfig(n_steps=10, dt=0.01, field=100)

print("h, h*dt, R")
for pt in run_sweep(base, "h", np.linspace(10, 250, 13), IDEAL):
    print(f"{pt.value:6.1f} {pt.value * base.dt:5.2f} {pt.result.fidelity:.4f}")

# too small dt is a sudden quench, too large breaks the product formula
print("dt, R  (N=50)")
for pt in run_sweep(AnnealConfig(n_steps=50), "dt", np.geomspace(1e-4, 0.05, 10), IDEAL, workers=4):
    print(f"{pt.value:.2e} {pt.result.fidelity:.4f}")

# at fixed dt=0.01 the problem phases wrap: dt * 1296 is about 13 rad
print("N, R  (dt=0.01)")
for pt in run_sweep(base, "N", [10, 50, 100, 200, 1000], IDEAL):
    print(int(pt.value), round(pt.result.fidelity, 4))

"""
One annealing run, ideal and compiled
=====================================

N Trotter steps of length dt move from the transverse field to the
problem Hamiltonian. R is the final probability of |1,-1,1>, i.e. 5 x 3.
"""
from qutrit_anneal.engine import run
from qutrit_anneal.hamiltonians import COMPILED, IDEAL, AnnealConfig, RunMode, Method

cfg = AnnealConfig(n_steps=10, dt=0.01, field=100)
for mode in (IDEAL, COMPILED, RunMode(Method.IDEAL, True), RunMode(Method.COMPILED, True)):
    res = run(cfg, mode, track=True)
    steps = " ".join(f"{r:.2f}" for r in res.per_step_overlap)
    print(f"{str(mode):14s} R = {res.fidelity:.4f}   per step: {steps}")

# the second operating point
tuned = AnnealConfig(n_steps=10, dt=0.0087, field=160)
print("tuned ideal:", run(tuned, IDEAL).fidelity, " symmetrized:", run(tuned, RunMode(Method.IDEAL, True)).fidelity)

# more steps at small dt approach the adiabatic limit
for n in (100, 300, 1000):
    print(n, run(AnnealConfig(n_steps=n, dt=0.001, field=100), IDEAL).fidelity)

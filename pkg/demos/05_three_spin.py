"""
Three-spin terms from commutators
=================================

S1z S2z S3z is not reachable by pair couplings alone. A group commutator
of two pair evolutions gives it to second order; the remainder is third
order in the leg angle, so splitting one rotation into k pieces helps.
"""
import numpy as np

from qutrit_anneal.verification import sandwich_error, triple_error

bs = np.array([0.4, 0.2, 0.1, 0.05])
errs = np.array([sandwich_error(b) for b in bs])
for b, e in zip(bs, errs):
    print(f"b = {b:5.2f}  error = {e:.3e}")
print("fitted order:", np.polyfit(np.log(bs), np.log(errs), 1)[0])

# coefficient 96 at dt = 0.01
for k in (1, 3, 7, 21, 63):
    print(f"splits = {k:3d}  error = {triple_error(0.96, k):.4f}")

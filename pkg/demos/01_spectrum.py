"""
Encoding 15 = p * q on three qutrits
====================================

p = 6*a1 + 2*a2 + 1 and q = 2*b + 1 with a1, a2, b in {-1, 0, 1}.
The problem Hamiltonian is (15 - p*q)^2, diagonal in the S^z basis.
"""
import numpy as np

from qutrit_anneal.hamiltonians import PROBLEM_POLYNOMIAL, factors, problem_spectrum

# the expanded polynomial, one coefficient per monomial a1^i a2^j b^k
for (i, j, k), c in sorted(PROBLEM_POLYNOMIAL.items(), key=lambda kv: -abs(kv[1])):
    print(f"{c:+5d}  a1^{i} a2^{j} b^{k}")

# all 27 energies, lowest first
spec = problem_spectrum()
for label, e in spec[:6]:
    print(tuple(label), factors(label), e)

energies = np.array([e for _, e in spec])
print("zero-energy states:", int((energies == 0).sum()))
print("largest energy:", energies.max(), " -> dt * max stays below 2*pi only for dt <", 2 * np.pi / energies.max())

"""
Pulse identities on the qutrit register
=======================================

Each diagonal problem term is realized by selective rotations plus
free evolution under the dipolar coupling. Here we check a few of them
against dense matrix exponentials.
"""
import numpy as np
from scipy.linalg import expm

from qutrit_anneal.compiler import compile_linear, compile_pair_z_zsq, compile_pair_zz, compile_quadratic_single
from qutrit_anneal.pulses import evaluate_program, format_program, inversion_program
from qutrit_anneal.spinops import sz

Z = {k: sz(k) for k in (1, 2, 3)}


def gap(prog, op, phase):
    return np.abs(evaluate_program(prog) - expm(-1j * phase * op)).max()


# single-spin terms need only Z rotations
print("linear   ", gap(compile_linear(2, -0.39), Z[2], -0.39))
print("quadratic", gap(compile_quadratic_single(1, 0.25), Z[1] @ Z[1], 0.25))

# the inversion pulse flips S^z on one spin
P = evaluate_program(inversion_program(3))
print("P S3z P^+ = -S3z:", np.allclose(P.conj().T @ Z[3] @ P, -Z[3]))

# pair coupling: free evolution with one spin inverted halfway
prog = compile_pair_zz((1, 3), 0.5)
print(format_program(prog))
print("zz(1,3)  ", gap(prog, Z[1] @ Z[3], 0.5))

# S^z S^z^2 through the squaring trick
print("z*zsq    ", gap(compile_pair_z_zsq(3, 2, 0.112), Z[3] @ Z[2] @ Z[2], 0.112))

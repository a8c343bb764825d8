# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels for the state-vector simulator.

Index convention: bit k of a basis index is spin k (0 = up, 1 = down).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def apply_two_spin_gate(cnp.complex128_t[::1] psi, int n_spins, int q0, int q1,
                        cnp.complex128_t[:, ::1] u):
    """In-place 4x4 gate on spins (q0, q1); local index = bit(q0) + 2*bit(q1)."""
    cdef Py_ssize_t dim = 1 << n_spins
    cdef Py_ssize_t m0 = 1 << q0
    cdef Py_ssize_t m1 = 1 << q1
    cdef Py_ssize_t pair_mask = m0 | m1
    cdef Py_ssize_t i, i1, i2, i3
    cdef double complex a0, a1, a2, a3
    for i in range(dim):
        if i & pair_mask:
            continue
        i1 = i | m0
        i2 = i | m1
        i3 = i | pair_mask
        a0 = psi[i]
        a1 = psi[i1]
        a2 = psi[i2]
        a3 = psi[i3]
        psi[i] = u[0, 0] * a0 + u[0, 1] * a1 + u[0, 2] * a2 + u[0, 3] * a3
        psi[i1] = u[1, 0] * a0 + u[1, 1] * a1 + u[1, 2] * a2 + u[1, 3] * a3
        psi[i2] = u[2, 0] * a0 + u[2, 1] * a1 + u[2, 2] * a2 + u[2, 3] * a3
        psi[i3] = u[3, 0] * a0 + u[3, 1] * a1 + u[3, 2] * a2 + u[3, 3] * a3


def apply_spin_phases(cnp.complex128_t[::1] psi, int n_spins,
                      cnp.complex128_t[:, ::1] phases):
    """In-place diagonal: psi[i] *= prod_k phases[k, bit_k(i)].

    phases has shape (n_spins, 2); rows equal to (1, 1) are skipped.
    """
    cdef Py_ssize_t dim = 1 << n_spins
    cdef Py_ssize_t i
    cdef int k
    cdef double complex f
    for i in range(dim):
        f = 1.0
        for k in range(n_spins):
            f = f * phases[k, (i >> k) & 1]
        psi[i] = psi[i] * f


def singlet_components(cnp.complex128_t[::1] psi, int n_spins, int q0, int q1,
                       cnp.complex128_t[::1] out):
    """Write the pair-singlet amplitude for each spectator configuration.

    out has length 2**(n_spins-2); its index packs the non-pair bits in
    ascending spin order. Returns the singlet probability.
    """
    cdef Py_ssize_t dim = 1 << n_spins
    cdef Py_ssize_t m0 = 1 << q0
    cdef Py_ssize_t m1 = 1 << q1
    cdef Py_ssize_t pair_mask = m0 | m1
    cdef Py_ssize_t i, j
    cdef int k
    cdef double inv_sqrt2 = 0.7071067811865476
    cdef double complex a
    cdef double p = 0.0
    j = 0
    for i in range(dim):
        if i & pair_mask:
            continue
        a = inv_sqrt2 * (psi[i | m1] - psi[i | m0])
        out[j] = a
        p += a.real * a.real + a.imag * a.imag
        j += 1
    return p

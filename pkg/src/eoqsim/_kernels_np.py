"""Pure-numpy fallback for the compiled state-vector kernels.

Same contracts as the Cython versions in _kernels.pyx; used when the
extension is unavailable or explicitly disabled.
"""

from __future__ import annotations

import numpy as np

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def apply_two_spin_gate(psi: np.ndarray, n_spins: int, q0: int, q1: int, u: np.ndarray):
    # Axis j of the reshaped tensor is bit (n_spins-1-j); moving q1 then q0
    # to the front makes the flattened leading index = 2*bit(q1) + bit(q0),
    # matching the gate's local ordering.
    t = psi.reshape([2] * n_spins)
    t = np.moveaxis(t, (n_spins - 1 - q1, n_spins - 1 - q0), (0, 1))
    shape = t.shape
    flat = t.reshape(4, -1)
    np.matmul(u, flat, out=flat)
    t = np.moveaxis(flat.reshape(shape), (0, 1), (n_spins - 1 - q1, n_spins - 1 - q0))
    psi[:] = t.reshape(-1)


def apply_spin_phases(psi: np.ndarray, n_spins: int, phases: np.ndarray):
    idx = np.arange(psi.size)
    for k in range(n_spins):
        if phases[k, 0] == 1.0 and phases[k, 1] == 1.0:
            continue
        psi *= np.where((idx >> k) & 1, phases[k, 1], phases[k, 0])


def singlet_components(psi: np.ndarray, n_spins: int, q0: int, q1: int, out: np.ndarray):
    t = psi.reshape([2] * n_spins)
    t = np.moveaxis(t, (n_spins - 1 - q1, n_spins - 1 - q0), (0, 1))
    # local (bit_q1, bit_q0): |up_q0 down_q1> is t[1,0]; |down_q0 up_q1> is t[0,1].
    # Remaining axes stay in descending-spin order, so flattening packs the
    # non-pair bits in ascending spin order, matching the compiled kernel.
    amps = _INV_SQRT2 * (t[1, 0] - t[0, 1])
    out[:] = amps.reshape(-1)
    return float(np.vdot(out, out).real)

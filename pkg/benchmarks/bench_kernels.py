#!/usr/bin/env python3
"""Compare the compiled and pure-numpy kernel backends.

Times raw two-spin gate application at several register sizes, then a
realistic randomized-benchmarking workload (random exchange pulses with
Zeeman phases on a 6-spin register). Run from the repo root:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from eoqsim import _kernels_np

try:
    from eoqsim import _kernels
except ImportError:
    _kernels = None

BACKENDS = {"numpy": _kernels_np}
if _kernels is not None:
    BACKENDS["cython"] = _kernels


def _random_state(n, rng):
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    psi /= np.linalg.norm(psi)
    return np.ascontiguousarray(psi)


def _random_unitary(rng):
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    return np.ascontiguousarray(np.linalg.qr(m)[0])


def bench_gates(n_spins: int, reps: int) -> dict:
    rng = np.random.default_rng(1)
    psi = _random_state(n_spins, rng)
    u = _random_unitary(rng)
    pairs = [tuple(rng.choice(n_spins, size=2, replace=False)) for _ in range(32)]
    out = {}
    for name, mod in BACKENDS.items():
        work = psi.copy()
        t0 = time.perf_counter()
        for r in range(reps):
            q0, q1 = pairs[r % len(pairs)]
            mod.apply_two_spin_gate(work, n_spins, int(q0), int(q1), u)
        out[name] = reps / (time.perf_counter() - t0)
    return out


def bench_rb_like(reps: int) -> dict:
    """Pulse + idle-phase pattern matching one RB shot on a 2x3 grid."""
    n = 6
    rng = np.random.default_rng(2)
    psi = _random_state(n, rng)
    u = _random_unitary(rng)
    phases = np.ascontiguousarray(np.exp(1j * rng.normal(size=(n, 2))))
    scratch = np.empty(2 ** (n - 2), dtype=np.complex128)
    out = {}
    for name, mod in BACKENDS.items():
        work = psi.copy()
        t0 = time.perf_counter()
        for _ in range(reps):
            mod.apply_spin_phases(work, n, phases)
            mod.apply_two_spin_gate(work, n, 1, 2, u)
            mod.apply_spin_phases(work, n, phases)
            mod.singlet_components(work, n, 1, 2, scratch)
        out[name] = reps / (time.perf_counter() - t0)
    return out


def main():
    print(f"backends: {', '.join(BACKENDS)}")
    print("\ntwo-spin gate applications per second")
    print(f"{'n_spins':>8} " + " ".join(f"{b:>12}" for b in BACKENDS) + "   speedup")
    for n, reps in ((6, 20000), (8, 20000), (10, 5000), (12, 1000)):
        rates = bench_gates(n, reps)
        ratio = rates.get("cython", rates["numpy"]) / rates["numpy"]
        print(
            f"{n:>8} "
            + " ".join(f"{rates[b]:>12.0f}" for b in BACKENDS)
            + f"   {ratio:6.1f}x"
        )
    print("\nRB-shot-like pulse cycles per second (6 spins)")
    rates = bench_rb_like(20000)
    ratio = rates.get("cython", rates["numpy"]) / rates["numpy"]
    print("  " + "  ".join(f"{b}: {r:.0f}" for b, r in rates.items()) + f"  ({ratio:.1f}x)")


if __name__ == "__main__":
    main()

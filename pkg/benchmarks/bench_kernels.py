"""Timing comparison of the numba kernels against the pure-numpy fallback.

Run as a script:

    python3 benchmarks/bench_kernels.py [--L 14] [--repeat 5]

Covers the three hot paths: two-qubit gate application over a circuit
layer sweep, subset-position packing used by the bipartition average,
and the SWAP-walk occupation sampler.  The first numba call compiles;
compilation time is reported separately from the steady-state timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from entdyn import _kernels
from entdyn.basis import _subset_positions, bond_groups, enumerate_sector
from entdyn.bipartition_markov import _successor_table
from entdyn.entanglement import Bipartition, enumerate_bipartitions
from entdyn.operators import build_two_qubit_gate
from entdyn.state import random_sector_state


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_gate_mix(L: int, repeat: int, layers: int = 50) -> dict:
    basis = enumerate_sector(L, 0)
    rng = np.random.default_rng(7)
    state = random_sector_state(basis, rng)
    gate = build_two_qubit_gate(1.1, 2.3)
    groups = [bond_groups(basis, b) for b in range(1, L)]

    def run() -> None:
        amps = state.amplitudes.copy()
        for _ in range(layers):
            for uu, dd, ud, du in groups:
                _kernels.gate_mix(amps, uu, dd, ud, du, gate.u)

    return {"name": f"gate_mix L={L} x{layers} layers", "fn": run, "repeat": repeat}


def bench_pack_bits(L: int, repeat: int) -> dict:
    basis = enumerate_sector(L, 0)
    cuts = enumerate_bipartitions(L)[:64]

    def run() -> None:
        for bp in cuts:
            _subset_positions(basis, bp.sites)

    return {"name": f"pack_bits L={L} x{len(cuts)} cuts", "fn": run, "repeat": repeat}


def bench_swap_walk(L: int, repeat: int, steps: int = 2_000_000) -> dict:
    states, table = _successor_table(L)
    start = next(
        i for i, bp in enumerate(states) if bp.mask == Bipartition.half_chain(L).mask
    )

    def run() -> None:
        rng = np.random.default_rng(3)
        bonds = rng.integers(0, L - 1, size=steps)
        _kernels.swap_walk(table, start, bonds, steps // 10)

    return {"name": f"swap_walk L={L} {steps} steps", "fn": run, "repeat": repeat}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--L", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if not _kernels.has_numba():
        raise SystemExit("numba is not importable; nothing to compare")

    cases = [
        bench_gate_mix(args.L, args.repeat),
        bench_pack_bits(args.L, args.repeat),
        bench_swap_walk(args.L, args.repeat),
    ]

    # Compile pass, timed once so the one-off cost is visible.
    _kernels.set_backend("numba")
    t0 = time.perf_counter()
    for case in cases:
        case["fn"]()
    compile_s = time.perf_counter() - t0

    rows = []
    for case in cases:
        _kernels.set_backend("numba")
        t_nb = _time(case["fn"], case["repeat"])
        _kernels.set_backend("numpy")
        t_np = _time(case["fn"], case["repeat"])
        rows.append((case["name"], t_np, t_nb, t_np / t_nb))
    _kernels.set_backend("auto")

    width = max(len(r[0]) for r in rows)
    print(f"first numba pass (includes jit compile): {compile_s:.2f}s")
    print(f"{'case'.ljust(width)}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for name, t_np, t_nb, speed in rows:
        print(f"{name.ljust(width)}  {t_np:>9.4f}s  {t_nb:>9.4f}s  {speed:>7.2f}x")


if __name__ == "__main__":
    main()

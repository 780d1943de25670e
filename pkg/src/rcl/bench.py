"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python -m rcl.bench [--m 200000] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from .kernels import IMPLEMENTATIONS


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _cases(m: int):
    rng = np.random.default_rng(0)
    coefs = np.array([[0.21757131728816847, 1.1e-17, 0.3, 0.0, 0.7, 0.0]])
    z1 = np.ascontiguousarray(rng.random((m, 1)))
    # exact-mode r=2 kernel is capped at 300 points in real use
    z2 = np.ascontiguousarray(rng.random((300, 2)))
    h1 = np.array([3], dtype=np.int64)
    xs = np.sort(rng.random(2000))
    v, counts = np.unique(xs, return_counts=True)
    le = np.cumsum(counts).astype(np.int64)
    lt = (le - counts).astype(np.int64)
    cells = rng.integers(0, 40, size=(128, 128)).astype(np.int64)
    cm = int(cells.sum())
    out = np.empty((m, 1))

    def case_torus(impl):
        impl.torus_fill(coefs, 1, m, out)

    def case_box(impl):
        impl.box_scan(z1, 1.0 / 13, 2.0**-50)

    def case_weyl(impl):
        impl.weyl_sum(z1, h1)

    def case_disc1(impl):
        impl.disc1_extreme(v, lt, le, xs.size)

    def case_disc2(impl):
        impl.disc2_extreme(
            np.ascontiguousarray(z2[:, 0]), np.ascontiguousarray(z2[:, 1]),
            z2.shape[0],
        )

    def case_grid2(impl):
        impl.grid_extreme_2d(cells, cm)

    return [
        (f"torus_fill m={m}", case_torus),
        (f"box_scan m={m}", case_box),
        (f"weyl_sum m={m}", case_weyl),
        ("disc1_extreme m=2000", case_disc1),
        ("disc2_extreme m=300", case_disc2),
        ("grid_extreme_2d G=128", case_grid2),
    ]


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    names = sorted(IMPLEMENTATIONS)
    print(f"backends: {', '.join(names)}")
    header = f"{'kernel':28s}" + "".join(f"{n:>14s}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for label, case in _cases(args.m):
        times = {n: _time(lambda n=n: case(IMPLEMENTATIONS[n]), args.repeat)
                 for n in names}
        row = f"{label:28s}" + "".join(f"{times[n] * 1e3:12.2f}ms" for n in names)
        if len(names) == 2:
            row += f"{times['python'] / times['compiled']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()

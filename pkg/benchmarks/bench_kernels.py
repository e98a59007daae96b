#!/usr/bin/env python3
"""Benchmark the compiled simulation kernels against the pure-Python lane.

Both lanes are bit-identical by construction, so this only measures speed.

    python benchmarks/bench_kernels.py [--paths N] [--python-paths N]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from triggercds._kernels import _pykernels

try:
    from triggercds._kernels import _ckernels
except ImportError:
    _ckernels = None


def _fixture():
    v = np.array([3.0, 2.0, 1.0, 3.0])
    P = (np.ones((4, 4)) - np.eye(4)) / 3.0
    lam = np.array([0.1, 0.2, 0.3, 0.4])
    p = 1.0 - np.exp(-lam)
    y = lam * (1.0 - np.exp(-lam))
    r = np.full(4, 0.05)
    ones = np.ones(4)
    return v, P, lam, p, y, r, ones


def _workloads(v, P, lam, p, y, r, ones):
    def occupation(mod, n):
        occ = np.empty((n, 4))
        term = np.empty(n, dtype=np.int64)
        mod.occupation_batch(1, 0, n, v, P, 0, 5.0, occ, term)

    def single_name(mod, n):
        tau = np.empty(n)
        occ = np.empty((n, 4))
        mod.single_name_batch(1, 0, n, v, P, lam, p, 0, 5.0, tau, occ)

    def claim(mod, n):
        outs = [np.empty(n) for _ in range(4)]
        mod.claim_batch(1, 0, n, v, P, lam, p, 0, 5.0, r, ones, ones, ones, *outs)

    def two_firm(mod, n):
        tauA = np.empty(n)
        tauB = np.empty(n)
        mod.two_firm_batch(1, 0, n, 0.15, 0.3, 0.25, 0.1, 0.6, tauA, tauB)

    def basket(mod, n):
        taus = np.empty((n, 10))
        mod.basket_batch(1, 0, n, v, P, y, 0, 5.0, 10, 0.1, taus)

    return [
        ("occupation_batch", occupation),
        ("single_name_batch", single_name),
        ("claim_batch", claim),
        ("two_firm_batch", two_firm),
        ("basket_batch", basket),
    ]


def _time(fn, mod, n) -> float:
    fn(mod, min(n, 1000))  # warm up
    start = time.perf_counter()
    fn(mod, n)
    return (time.perf_counter() - start) / n * 1e6


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--paths", type=int, default=200_000,
                        help="paths per kernel on the compiled lane")
    parser.add_argument("--python-paths", type=int, default=20_000,
                        help="paths per kernel on the pure-Python lane")
    args = parser.parse_args()

    fixture = _fixture()
    print(f"{'kernel':20s} {'python us/path':>16s} {'cython us/path':>16s} {'speedup':>9s}")
    for name, fn in _workloads(*fixture):
        t_py = _time(fn, _pykernels, args.python_paths)
        if _ckernels is None:
            print(f"{name:20s} {t_py:16.2f} {'(not built)':>16s} {'-':>9s}")
            continue
        t_cy = _time(fn, _ckernels, args.paths)
        print(f"{name:20s} {t_py:16.2f} {t_cy:16.2f} {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()

"""Compiled kernels against their interpreted ``py_func`` on chain automata.

    python benchmarks/bench_kernels.py [--states 200 400] [--repeat 3]

Both paths get the same numpy arrays and must return the same results;
the table reports the best of ``--repeat`` runs after one warm-up call.
"""

import argparse
import time

import numpy as np

from wtagrowth import _kernels as K
from wtagrowth._jit import USE_JIT
from wtagrowth.gen import chain_automaton


def _cases(A):
    T = A.tables
    n = T.n
    tup = (T.rank, T.slot_letter, T.slot_pos, T.pi_off, T.pi_tr,
           T.leaf_off, T.leaf_tr, T.tr_off, T.tr_child, T.tr_target)
    empty = np.zeros(0, np.int64)
    return {
        "horn_accessible": (K.horn_accessible,
                            (T.n, T.tr_off, T.tr_child, T.tr_target, T.occ_off, T.occ_tr)),
        "pair_accessible": (K.tuple_accessible, (2, n) + tup),
        "seidl_ambiguous": (K.seidl_ambiguous, (n,) + tup),
        "degree_fixpoint": (K.degree_fixpoint,
                            (n, T.tr_off, T.tr_child, T.tr_target, empty, empty, n + 1)),
    }


def _best(fn, args, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--states", type=int, nargs="+", default=[100, 200])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    if not USE_JIT:
        print("jit disabled (WTAGROWTH_NO_JIT set); both columns run interpreted code")
    print(f"{'kernel':<18}{'states':>8}{'jit s':>12}{'python s':>12}{'speedup':>10}")
    for n in args.states:
        cases = _cases(chain_automaton(n))
        for name, (fn, kargs) in cases.items():
            fn(*kargs)  # compile / warm caches
            tj, rj = _best(fn, kargs, args.repeat)
            tp, rp = _best(fn.py_func, kargs, 1)
            if not _same(rj, rp):
                raise SystemExit(f"{name}: compiled and interpreted results differ")
            print(f"{name:<18}{n:>8}{tj:>12.5f}{tp:>12.5f}{tp / max(tj, 1e-9):>10.1f}")


if __name__ == "__main__":
    main()

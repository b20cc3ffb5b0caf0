"""Time the numba kernels against the pure-numpy fallbacks.

Run: python3 benchmarks/bench_kernels.py
(set CAUSALUPLIFT_NO_NUMBA=1 to confirm the fallback wiring; this script
imports both implementations directly so the comparison itself does not
depend on the flag)
"""

import time

import numpy as np

from causaluplift import _kernels as K


def timeit(fn, *args, repeat=5):
    best = float("inf")
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, out


def bench_joint_counts(rng):
    n = 200_000
    xc = rng.integers(0, 3, n)
    yc = rng.integers(0, 2, n)
    zf = rng.integers(0, 27, n)
    jit = K.joint_counts if K.USE_NUMBA else None
    rows = []
    if jit is not None:
        jit(xc[:100], yc[:100], zf[:100], 3, 2, 27)  # warm the JIT
        t_jit, a = timeit(jit, xc, yc, zf, 3, 2, 27)
    else:
        t_jit, a = float("nan"), None
    t_np, b = timeit(K._joint_counts_np, xc, yc, zf, 3, 2, 27)
    if a is not None:
        assert np.array_equal(a, b)
    return ("joint_counts (n=200k, 3x2x27)", t_jit, t_np)


def bench_grow_tree(rng):
    n, f, bins = 20_000, 40, 32
    codes = rng.integers(0, bins, size=(n, f)).astype(np.uint8)
    labels = (rng.random(n) < 0.4).astype(np.uint8)
    boot = rng.integers(0, n, n).astype(np.int64)
    args = (codes, labels, boot, 6, bins, 12, 1, 777)
    if K.USE_NUMBA:
        K.grow_tree(codes[:200], labels[:200], boot[:200] % 200, 6, bins, 4, 1, 777)
        t_jit, a = timeit(K.grow_tree, *args, repeat=3)
    else:
        t_jit, a = float("nan"), None
    t_np, b = timeit(K._grow_tree_py, *args, repeat=3)
    if a is not None:
        for x, y in zip(a, b):
            assert np.array_equal(x, y)
    return (f"grow_tree (n=20k, {f} feats, depth 12)", t_jit, t_np)


def bench_tree_leaves(rng):
    n, f, bins = 20_000, 40, 32
    codes = rng.integers(0, bins, size=(n, f)).astype(np.uint8)
    labels = (rng.random(n) < 0.4).astype(np.uint8)
    boot = np.arange(n, dtype=np.int64)
    tree = K._grow_tree_py(codes, labels, boot, 6, bins, 12, 1, 3)
    probe = rng.integers(0, bins, size=(100_000, f)).astype(np.uint8)
    if K.USE_NUMBA:
        K.tree_leaves(probe[:100], *tree[:4])
        t_jit, a = timeit(K.tree_leaves, probe, *tree[:4])
    else:
        t_jit, a = float("nan"), None
    t_np, b = timeit(K._tree_leaves_np, probe, *tree[:4])
    if a is not None:
        assert np.array_equal(a, b)
    return ("tree_leaves (100k rows)", t_jit, t_np)


def main():
    rng = np.random.default_rng(0)
    print(f"numba path active: {K.USE_NUMBA}")
    print(f"{'kernel':<42} {'numba':>10} {'numpy':>10} {'speedup':>9}")
    for bench in (bench_joint_counts, bench_grow_tree, bench_tree_leaves):
        name, t_jit, t_np = bench(rng)
        if t_jit == t_jit:
            jit_txt = f"{t_jit * 1e3:9.2f}ms"
            speed_txt = f"{t_np / t_jit:8.1f}x"
        else:
            jit_txt = "      n/a"
            speed_txt = "       -"
        print(f"{name:<42} {jit_txt:>10} {t_np * 1e3:9.2f}ms {speed_txt}")


if __name__ == "__main__":
    main()

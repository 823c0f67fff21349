"""Compare the compiled and pure-Python kernels on representative compiles.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

from fibauto import kernels
from fibauto.compiler import CompileEnv, compile

CASES = [
    ("squares", "(n > 0) & Ei At t < n => F[i+t] = F[i+t+n]"),
    ("prefix palindromes", "Ai i < n => F[i] = F[n-1-i]"),
    ("unbordered", "Ei Aj (j >= 1 & 2*j <= n) => Et t < j & F[i+t] != F[i+n-j+t]"),
    ("rote squares", "(n >= 1) & Ei Aj j < n => R[i+j] = R[i+j+n]"),
    ("palindromes", "Ei Aj j < n => F[i+j] = F[i+n-1-j]"),
    ("lyndon", "n >= 1 & Ei Aj (1 <= j & j < n) => Et t < n-j & "
               "(Au u < t => F[i+u] = F[i+j+u]) & F[i+t] < F[i+j+t]"),
    ("tmf squares", "(n >= 1) & Ei Aj j < n => V[i+j] = V[i+j+n]"),
]


def time_case(pred, backend, repeat):
    best = float("inf")
    peak = 0
    with kernels.using_backend(backend):
        for _ in range(repeat):
            t0 = time.perf_counter()
            _, log = compile(pred, CompileEnv(use_cache=False))
            best = min(best, time.perf_counter() - t0)
            peak = log.peak
    return best, peak


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"{'case':<20} {'peak':>8} " + " ".join(f"{b + ' s':>10}" for b in backends)
          + ("   speedup" if len(backends) == 2 else ""))
    for name, pred in CASES:
        res = {b: time_case(pred, b, args.repeat) for b in backends}
        peak = res[backends[0]][1]
        row = f"{name:<20} {peak:>8} " + " ".join(f"{res[b][0]:>10.3f}" for b in backends)
        if "cython" in res:
            row += f"   {res['python'][0] / res['cython'][0]:>6.1f}x"
        print(row)


if __name__ == "__main__":
    main()

"""Compare the compiled relation kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--sizes 16,64,128] [--repeat 20]

Also times a whole-corpus check under each backend, in a subprocess so the
backend choice made at import is honoured.
"""

import argparse
import os
import random
import subprocess
import sys
import timeit
from pathlib import Path

from elitmus import _kernels_py

try:
    from elitmus import _kernels
except ImportError:
    _kernels = None

CORPUS = Path(__file__).resolve().parents[1] / "src" / "elitmus" / "corpus"


def random_rows(rng, n, density):
    rows = []
    for _ in range(n):
        r = 0
        for j in range(n):
            if rng.random() < density:
                r |= 1 << j
        rows.append(r)
    return rows


def bench(mod, n, repeat, rng):
    a = random_rows(rng, n, 2 / n)
    b = random_rows(rng, n, 2 / n)
    out = {}
    for name, fn in (("compose", lambda: mod.compose(a, b, n)),
                     ("closure", lambda: mod.closure(a, n)),
                     ("is_acyclic", lambda: mod.is_acyclic(a, n))):
        out[name] = min(timeit.repeat(fn, number=1, repeat=repeat)) * 1e6
    return out


def corpus_time(pure: bool) -> float:
    env = dict(os.environ)
    if pure:
        env["ELITMUS_PURE"] = "1"
    else:
        env.pop("ELITMUS_PURE", None)
    code = ("import time; from elitmus.harness import run_suite; t=time.perf_counter(); "
            f"run_suite({str(CORPUS)!r}, ('default',)); print(time.perf_counter()-t)")
    r = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(r.stdout)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="16,64,128,256")
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--no-corpus", action="store_true")
    args = ap.parse_args()
    if _kernels is None:
        print("compiled kernels not built; only the pure-Python backend is available")
    print(f"{'n':>5} {'kernel':12} {'python us':>12} {'compiled us':>12} {'speedup':>8}")
    for n in map(int, args.sizes.split(",")):
        py = bench(_kernels_py, n, args.repeat, random.Random(n))
        cy = bench(_kernels, n, args.repeat, random.Random(n)) if _kernels else {}
        for k, t in py.items():
            c = cy.get(k)
            extra = f"{c:12.1f} {t / c:7.1f}x" if c else f"{'-':>12} {'-':>8}"
            print(f"{n:5d} {k:12} {t:12.1f} {extra}")
    if not args.no_corpus:
        py = corpus_time(True)
        line = f"corpus, default variant: python {py:.2f}s"
        if _kernels:
            cy = corpus_time(False)
            line += f", compiled {cy:.2f}s ({py / cy:.1f}x)"
        print(line)


if __name__ == "__main__":
    main()

"""Compare the compiled and numpy conditional-entropy kernels.

    python benchmarks/bench_kernels.py [--calls N] [--states N]

Part one times single kernel calls on identical inputs. Part two times a full
classical-correlation optimization with each backend, in a child process so
the backend is picked at import exactly as users get it.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from qcorr import _kernels_py
from qcorr.states import random_density

try:
    from qcorr import _kernels
except ImportError:
    _kernels = None

CHILD = """
import time
from qcorr import kernels
from qcorr.measurement import classical_correlation
from qcorr.states import random_density
states = [random_density({dims}, {rank}, s) for s in range({n})]
t0 = time.perf_counter()
for rho in states:
    classical_correlation(rho)
print(kernels.BACKEND, (time.perf_counter() - t0) / {n})
"""


def kernel_inputs(d_a, d_b, n_vec, seed=0):
    rng = np.random.default_rng(seed)
    rho = random_density((d_a, d_b), d_a * d_b, rng)
    rho4 = np.ascontiguousarray(rho.op.reshape(d_a, d_b, d_a, d_b))
    z = rng.standard_normal((n_vec, d_b)) + 1j * rng.standard_normal((n_vec, d_b))
    vecs = np.ascontiguousarray(z / np.linalg.norm(z, axis=1, keepdims=True))
    return rho4, vecs


def per_call(fn, args, calls):
    return min(timeit.repeat(lambda: fn(*args), number=calls, repeat=5)) / calls


def bench_calls(calls):
    print(f"{'case':<22}{'numpy (us)':>12}{'cython (us)':>13}{'speedup':>9}  agree")
    for d_a, d_b, n_vec in [(2, 2, 2), (2, 2, 4), (3, 2, 2), (2, 4, 4), (4, 4, 16)]:
        args = kernel_inputs(d_a, d_b, n_vec)
        t_py = per_call(_kernels_py.weighted_conditional_entropy, args, calls)
        label = f"dA={d_a} dB={d_b} n={n_vec}"
        if _kernels is None:
            print(f"{label:<22}{t_py * 1e6:12.2f}{'n/a':>13}")
            continue
        t_cy = per_call(_kernels.weighted_conditional_entropy, args, calls)
        diff = abs(
            _kernels.weighted_conditional_entropy(*args)
            - _kernels_py.weighted_conditional_entropy(*args)
        )
        print(f"{label:<22}{t_py * 1e6:12.2f}{t_cy * 1e6:13.2f}{t_py / t_cy:9.1f}  {diff:.1e}")


def bench_optimizer(n_states):
    print(f"\nclassical_correlation, {n_states} random states per case (ms per state)")
    for dims, rank in [((2, 2), 4), ((2, 3), 6)]:
        results = {}
        for pure in ("0", "1"):
            env = {**os.environ, "QCORR_PURE_PYTHON": pure}
            code = CHILD.format(dims=dims, rank=rank, n=n_states)
            out = subprocess.run(
                [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
            ).stdout.split()
            results[out[0]] = float(out[1])
        line = "  ".join(f"{k} {v * 1e3:8.1f}" for k, v in sorted(results.items()))
        print(f"dims {dims}: {line}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--calls", type=int, default=2000)
    ap.add_argument("--states", type=int, default=10)
    args = ap.parse_args()
    bench_calls(args.calls)
    bench_optimizer(args.states)


if __name__ == "__main__":
    main()

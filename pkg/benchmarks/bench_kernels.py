"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from fdensity import kernels


def cases(rng):
    x = rng.random(200_000)
    g = np.sin(np.linspace(0.0, 20.0, 1_501))
    dev = np.abs(rng.standard_normal(1 << 17))
    fdev = np.log1p(dev)
    eps = np.array([1.0, 0.1, 0.01])
    grid = np.array([1 << j for j in range(4, 18)], dtype=np.int64)
    return {
        "cantor_many (2e5 points)": lambda b: b.cantor_many(x),
        "oscillation_by_lag (1501 samples)": lambda b: b.oscillation_by_lag(g),
        "scan_deviations (2^17, 3 eps)": lambda b: b.scan_deviations(dev, fdev, eps, grid),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = {"python": kernels.python_backend}
    if kernels.compiled_backend is not None:
        backends["cython"] = kernels.compiled_backend
    else:
        print("compiled extension not built; timing the Python backend only")
    rng = np.random.default_rng(0)
    print(f"{'kernel':36s} " + " ".join(f"{b:>12s}" for b in backends) + "      speedup")
    for name, run in cases(rng).items():
        times = {b: min(timeit.repeat(lambda: run(mod), number=1, repeat=args.repeat))
                 for b, mod in backends.items()}
        row = " ".join(f"{t * 1e3:10.2f}ms" for t in times.values())
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:36s} {row} {speed:10.1f}x")


if __name__ == "__main__":
    main()
